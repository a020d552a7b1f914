#include "sigregime/streams.hpp"

#include <algorithm>
#include <cmath>

#include "sigregime/error.hpp"

namespace sigregime {

Stream::Stream(std::vector<double> times, std::vector<double> values, std::size_t dim)
    : times_(std::move(times)), values_(std::move(values)), dim_(dim) {
  require(dim_ >= 1, ErrorKind::Shape, "stream dimension must be >= 1");
  require(times_.size() >= 2, ErrorKind::Argument, "stream needs at least 2 observations");
  require(values_.size() == times_.size() * dim_, ErrorKind::Shape,
          "stream values do not match length x dimension");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    require(std::isfinite(times_[i]), ErrorKind::Domain, "non-finite timestamp");
    if (i > 0)
      require(times_[i] > times_[i - 1], ErrorKind::Domain,
              "timestamps must be strictly increasing (index " + std::to_string(i) + ")");
  }
  for (double v : values_) require(std::isfinite(v), ErrorKind::Domain, "non-finite stream value");
}

Stream Stream::slice(std::size_t begin, std::size_t end) const {
  require(begin < end && end <= size(), ErrorKind::Range, "bad slice bounds");
  std::vector<double> t(times_.begin() + begin, times_.begin() + end);
  std::vector<double> v(values_.begin() + begin * dim_, values_.begin() + end * dim_);
  return Stream(std::move(t), std::move(v), dim_);
}

std::vector<double> embed_linear(const Stream& s, double t) {
  require(t >= s.time(0) && t <= s.time(s.size() - 1), ErrorKind::Range,
          "time outside the stream's range");
  const auto& ts = s.times();
  auto it = std::lower_bound(ts.begin(), ts.end(), t);
  std::size_t j = static_cast<std::size_t>(it - ts.begin());
  auto v = s.value(j);
  std::vector<double> out(v.begin(), v.end());
  if (ts[j] == t) return out;
  std::size_t i = j - 1;
  double w = (t - ts[i]) / (ts[j] - ts[i]);
  for (std::size_t c = 0; c < s.dim(); ++c) out[c] = (1.0 - w) * s.at(i, c) + w * s.at(j, c);
  return out;
}

double one_variation(const Stream& s, bool include_time) {
  double total = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    double sq = 0.0;
    if (include_time) sq += std::pow(s.time(i) - s.time(i - 1), 2);
    for (std::size_t c = 0; c < s.dim(); ++c) sq += std::pow(s.at(i, c) - s.at(i - 1, c), 2);
    total += std::sqrt(sq);
  }
  return total;
}

Transform parse_transform(const std::string& name, std::vector<double> lambda) {
  if (name == "time") return Transform::time_norm();
  if (name == "norm") return Transform::state_norm();
  if (name == "incr") return Transform::increment();
  if (name == "leadlag") return Transform::lead_lag();
  if (name == "scale") {
    require(!lambda.empty(), ErrorKind::Config, "scale transform needs lambda");
    return Transform::scale(std::move(lambda));
  }
  fail(ErrorKind::Config, "unknown transform '" + name + "'");
}

std::string transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::TimeNorm: return "time";
    case TransformKind::StateNorm: return "norm";
    case TransformKind::Increment: return "incr";
    case TransformKind::Scale: return "scale";
    case TransformKind::LeadLag: return "leadlag";
  }
  return "?";
}

namespace {

std::size_t transform_dim(const Transform& t, std::size_t d) {
  switch (t.kind) {
    case TransformKind::LeadLag: return 2 * d;
    case TransformKind::Scale:
      require(t.lambda.size() == 1 || t.lambda.size() == d, ErrorKind::Shape,
              "scale lambda has " + std::to_string(t.lambda.size()) + " entries for dimension " +
                  std::to_string(d));
      return d;
    default: return d;
  }
}

}  // namespace

Stream apply_transform(const Transform& t, const Stream& s) {
  const std::size_t n = s.size(), d = s.dim();
  std::vector<double> times = s.times();
  std::vector<double> vals = s.values();
  switch (t.kind) {
    case TransformKind::TimeNorm:
      // evenly spaced on [0, 1]
      for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i) / static_cast<double>(n - 1);
      break;
    case TransformKind::StateNorm:
      for (std::size_t c = 0; c < d; ++c)
        require(s.at(0, c) != 0.0, ErrorKind::Domain,
                "state normalisation with zero initial component " + std::to_string(c));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) vals[i * d + c] = s.at(i, c) / s.at(0, c);
      break;
    case TransformKind::Increment:
      for (std::size_t i = 1; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
          vals[i * d + c] = vals[(i - 1) * d + c] + std::abs(s.at(i, c) - s.at(i - 1, c));
      break;
    case TransformKind::Scale: {
      transform_dim(t, d);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
          vals[i * d + c] *= t.lambda.size() == 1 ? t.lambda[0] : t.lambda[c];
      break;
    }
    case TransformKind::LeadLag: {
      // (x_i, x_i) at even rows, (x_i, x_{i+1}) at odd rows; odd rows sit at
      // the midpoint in time
      std::vector<double> lt(2 * n - 1), lv((2 * n - 1) * 2 * d);
      for (std::size_t i = 0; i < n; ++i) {
        lt[2 * i] = s.time(i);
        for (std::size_t c = 0; c < d; ++c) {
          lv[(2 * i) * 2 * d + c] = s.at(i, c);
          lv[(2 * i) * 2 * d + d + c] = s.at(i, c);
        }
        if (i + 1 < n) {
          lt[2 * i + 1] = 0.5 * (s.time(i) + s.time(i + 1));
          for (std::size_t c = 0; c < d; ++c) {
            lv[(2 * i + 1) * 2 * d + c] = s.at(i, c);
            lv[(2 * i + 1) * 2 * d + d + c] = s.at(i + 1, c);
          }
        }
      }
      return Stream(std::move(lt), std::move(lv), 2 * d);
    }
  }
  return Stream(std::move(times), std::move(vals), d);
}

StreamTransformer::StreamTransformer(std::vector<Transform> transforms)
    : transforms_(std::move(transforms)) {
  for (const auto& t : transforms_)
    if (t.kind == TransformKind::Scale) {
      require(!t.lambda.empty(), ErrorKind::Argument, "scale transform needs lambda");
      for (double l : t.lambda) require(std::isfinite(l), ErrorKind::Argument, "non-finite scale");
    }
}

Stream StreamTransformer::operator()(const Stream& s) const {
  Stream out = s;
  for (auto it = transforms_.rbegin(); it != transforms_.rend(); ++it) out = apply_transform(*it, out);
  return out;
}

std::size_t StreamTransformer::output_dim(std::size_t input_dim) const {
  std::size_t d = input_dim;
  for (auto it = transforms_.rbegin(); it != transforms_.rend(); ++it) d = transform_dim(*it, d);
  return d;
}

StreamTransformer compose(std::vector<Transform> transforms) {
  return StreamTransformer(std::move(transforms));
}

StreamTransformer compose(std::vector<Transform> transforms, std::size_t input_dim) {
  StreamTransformer t(std::move(transforms));
  t.output_dim(input_dim);
  return t;
}

SubPathSet extract_subpaths(const Stream& s, std::size_t h1) {
  require(h1 >= 2, ErrorKind::Argument, "h1 must be >= 2");
  require(s.size() >= h1, ErrorKind::Argument, "stream shorter than h1");
  SubPathSet out;
  out.h1 = h1;
  std::size_t n1 = s.size() / h1;
  out.paths.reserve(n1);
  for (std::size_t j = 0; j < n1; ++j) out.paths.push_back(s.slice(j * h1, (j + 1) * h1));
  return out;
}

std::vector<const Stream*> EnsembleSet::members(std::size_t k) const {
  std::vector<const Stream*> out;
  out.reserve(h2);
  for (std::size_t i = k; i < k + h2; ++i) out.push_back(&subpaths->paths[i]);
  return out;
}

std::size_t EnsembleSet::coverage(std::size_t i) const {
  if (count == 0) return 0;
  std::size_t lo = i + 1 >= h2 ? i + 1 - h2 : 0;
  std::size_t hi = std::min(i, count - 1);
  return lo > hi ? 0 : hi - lo + 1;
}

EnsembleSet extract_ensembles(const SubPathSet& sp, std::size_t h2) {
  require(h2 >= 2, ErrorKind::Argument, "h2 must be >= 2");
  require(sp.size() > h2, ErrorKind::Argument, "need more than h2 sub-paths");
  return EnsembleSet{h2, sp.size() - h2, &sp};
}

}  // namespace sigregime
