#include "sigregime/signature.hpp"

#include <cmath>

#include "sigregime/error.hpp"

namespace sigregime {

Knots knots_of(const Stream& s, bool include_time, double scale) {
  Knots k;
  k.n = s.size();
  k.p = s.dim() + (include_time ? 1 : 0);
  k.x.resize(k.n * k.p);
  for (std::size_t i = 0; i < k.n; ++i) {
    double* r = k.x.data() + i * k.p;
    std::size_t c0 = 0;
    if (include_time) r[c0++] = s.time(i) / scale;
    for (std::size_t c = 0; c < s.dim(); ++c) r[c0 + c] = s.at(i, c) / scale;
  }
  return k;
}

std::size_t tensor_size(std::size_t d, std::size_t order) {
  std::size_t total = 0, p = 1;
  for (std::size_t k = 0; k <= order; ++k) {
    total += p;
    require(p < (std::size_t{1} << 40) / (d + 1), ErrorKind::Capacity, "tensor algebra too large");
    p *= d;
  }
  return total;
}

TensorSeries::TensorSeries(std::size_t d, std::size_t order) : d_(d), m_(order) {
  require(d >= 1, ErrorKind::Shape, "tensor dimension must be >= 1");
  off_.resize(order + 2);
  std::size_t p = 1;
  off_[0] = 0;
  for (std::size_t k = 0; k <= order; ++k) {
    off_[k + 1] = off_[k] + p;
    p *= d;
  }
  tensor_size(d, order);
  data_.assign(off_.back(), 0.0);
}

TensorSeries TensorSeries::unit(std::size_t d, std::size_t order) {
  TensorSeries t(d, order);
  t.data_[0] = 1.0;
  return t;
}

double TensorSeries::level_norm(std::size_t k) const {
  double s = 0.0;
  for (double v : level(k)) s += v * v;
  return std::sqrt(s);
}

double TensorSeries::dot(const TensorSeries& o) const {
  require(d_ == o.d_ && m_ == o.m_, ErrorKind::Shape, "tensor series mismatch in dot");
  double s = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) s += data_[i] * o.data_[i];
  return s;
}

void TensorSeries::mul_exp(const double* v) {
  // Horner: new a_k = sum_l a_{k-l} v^l / l!, highest level first so lower
  // levels are still the old values when read.
  std::vector<double> t, nt;
  for (std::size_t k = m_; k >= 1; --k) {
    t.assign(1, data_[0]);
    for (std::size_t j = 1; j <= k; ++j) {
      double f = 1.0 / static_cast<double>(k - j + 1);
      auto aj = level(j);
      nt.resize(aj.size());
      std::size_t w = t.size();
      for (std::size_t u = 0; u < w; ++u) {
        double tu = t[u] * f;
        double* o = nt.data() + u * d_;
        const double* a = aj.data() + u * d_;
        for (std::size_t c = 0; c < d_; ++c) o[c] = tu * v[c] + a[c];
      }
      t.swap(nt);
    }
    auto ak = level(k);
    std::copy(t.begin(), t.end(), ak.begin());
  }
}

TensorSeries tensor_exp(std::span<const double> v, std::size_t order) {
  require(order >= 1, ErrorKind::Argument, "order must be >= 1");
  TensorSeries t = TensorSeries::unit(v.size(), order);
  std::size_t d = v.size();
  for (std::size_t k = 1; k <= order; ++k) {
    auto prev = t.level(k - 1);
    auto cur = t.level(k);
    for (std::size_t u = 0; u < prev.size(); ++u)
      for (std::size_t c = 0; c < d; ++c) cur[u * d + c] = prev[u] * v[c] / static_cast<double>(k);
  }
  return t;
}

TensorSeries chen_product(const TensorSeries& a, const TensorSeries& b) {
  require(a.dim() == b.dim() && a.order() == b.order(), ErrorKind::Shape,
          "chen_product needs matching dimension and order");
  TensorSeries out(a.dim(), a.order());
  for (std::size_t i = 0; i <= a.order(); ++i) {
    auto o = out.level(i);
    for (std::size_t l = 0; l <= i; ++l) {
      auto al = a.level(l);
      auto bl = b.level(i - l);
      std::size_t nb = bl.size();
      for (std::size_t u = 0; u < al.size(); ++u) {
        double au = al[u];
        if (au == 0.0) continue;
        double* dst = o.data() + u * nb;
        for (std::size_t v = 0; v < nb; ++v) dst[v] += au * bl[v];
      }
    }
  }
  return out;
}

TensorSeries signature_of_knots(const Knots& k, std::size_t order) {
  require(k.n >= 2, ErrorKind::Argument, "signature needs at least 2 knots");
  require(order >= 1, ErrorKind::Argument, "order must be >= 1");
  TensorSeries sig = TensorSeries::unit(k.p, order);
  std::vector<double> inc(k.p);
  for (std::size_t i = 1; i < k.n; ++i) {
    for (std::size_t c = 0; c < k.p; ++c) inc[c] = k.row(i)[c] - k.row(i - 1)[c];
    sig.mul_exp(inc.data());
  }
  return sig;
}

TensorSeries truncated_signature(const Stream& s, std::size_t order, bool include_time) {
  return signature_of_knots(knots_of(s, include_time), order);
}

TensorSeries mean_series(const std::vector<TensorSeries>& sigs) {
  require(!sigs.empty(), ErrorKind::Argument, "empty ensemble");
  TensorSeries out(sigs[0].dim(), sigs[0].order());
  for (const auto& s : sigs) {
    require(s.dim() == out.dim() && s.order() == out.order(), ErrorKind::Shape,
            "ensemble signatures differ in shape");
    for (std::size_t i = 0; i < s.data().size(); ++i) out.data()[i] += s.data()[i];
  }
  for (double& v : out.data()) v /= static_cast<double>(sigs.size());
  return out;
}

TensorSeries expected_signature(const std::vector<Stream>& paths, std::size_t order,
                                bool include_time) {
  require(!paths.empty(), ErrorKind::Argument, "empty ensemble");
  std::vector<TensorSeries> sigs;
  sigs.reserve(paths.size());
  for (const auto& p : paths) sigs.push_back(truncated_signature(p, order, include_time));
  return mean_series(sigs);
}

Knots signature_lift_knots(const Knots& k, std::size_t order) {
  require(k.n >= 2, ErrorKind::Argument, "signature lift needs at least 2 knots");
  TensorSeries sig = TensorSeries::unit(k.p, order);
  Knots out;
  out.n = k.n;
  out.p = sig.data().size() - 1;
  out.x.assign(out.n * out.p, 0.0);
  std::vector<double> inc(k.p);
  for (std::size_t i = 1; i < k.n; ++i) {
    for (std::size_t c = 0; c < k.p; ++c) inc[c] = k.row(i)[c] - k.row(i - 1)[c];
    sig.mul_exp(inc.data());
    std::copy(sig.data().begin() + 1, sig.data().end(), out.x.begin() + i * out.p);
  }
  return out;
}

Stream signature_lift(const Stream& s, std::size_t order, bool include_time, double scale) {
  Knots lifted = signature_lift_knots(knots_of(s, include_time, scale), order);
  return Stream(s.times(), std::move(lifted.x), lifted.p);
}

}  // namespace sigregime
