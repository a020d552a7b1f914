#include "sigregime/mmd.hpp"

#include <algorithm>
#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "sigregime/error.hpp"
#include "sigregime/parallel.hpp"
#include "sigregime/rng.hpp"

namespace sigregime {

namespace {

void check_shapes(const Eigen::MatrixXd& kxx, const Eigen::MatrixXd& kxy, const Eigen::MatrixXd& kyy) {
  require(kxx.rows() == kxx.cols() && kyy.rows() == kyy.cols() && kxy.rows() == kxx.rows() &&
              kxy.cols() == kyy.rows(),
          ErrorKind::Shape, "inconsistent Gram block shapes");
  require(kxx.rows() >= 1 && kyy.rows() >= 1, ErrorKind::Shape, "empty Gram block");
}

double offdiag_sum(const Eigen::MatrixXd& k) { return k.sum() - k.trace(); }

bool all_explicit(const PathRefs& v) {
  for (auto* p : v)
    if (!p->explicit_sig) return false;
  return true;
}

// Closed forms through mean embeddings when feature vectors are explicit.
double explicit_mmd(const PathRefs& x, const PathRefs& y, Estimator e) {
  const std::size_t dim = x[0]->sig.data().size();
  std::vector<double> sx(dim, 0.0), sy(dim, 0.0);
  double nx2 = 0.0, ny2 = 0.0;
  for (auto* p : x) {
    const auto& v = p->sig.data();
    for (std::size_t i = 0; i < dim; ++i) {
      sx[i] += v[i];
      nx2 += v[i] * v[i];
    }
  }
  for (auto* p : y) {
    const auto& v = p->sig.data();
    for (std::size_t i = 0; i < dim; ++i) {
      sy[i] += v[i];
      ny2 += v[i] * v[i];
    }
  }
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    xx += sx[i] * sx[i];
    yy += sy[i] * sy[i];
    xy += sx[i] * sy[i];
  }
  if (e == Estimator::Biased) return xx / (n * n) - 2.0 * xy / (n * m) + yy / (m * m);
  return (xx - nx2) / (n * (n - 1)) - 2.0 * xy / (n * m) + (yy - ny2) / (m * (m - 1));
}

}  // namespace

double mmd_biased(const Eigen::MatrixXd& kxx, const Eigen::MatrixXd& kxy, const Eigen::MatrixXd& kyy) {
  check_shapes(kxx, kxy, kyy);
  const double n = static_cast<double>(kxx.rows()), m = static_cast<double>(kyy.rows());
  return kxx.sum() / (n * n) - 2.0 * kxy.sum() / (n * m) + kyy.sum() / (m * m);
}

double mmd_unbiased(const Eigen::MatrixXd& kxx, const Eigen::MatrixXd& kxy, const Eigen::MatrixXd& kyy) {
  check_shapes(kxx, kxy, kyy);
  require(kxx.rows() >= 2 && kyy.rows() >= 2, ErrorKind::Argument,
          "unbiased MMD needs at least 2 samples per side");
  const double n = static_cast<double>(kxx.rows()), m = static_cast<double>(kyy.rows());
  return offdiag_sum(kxx) / (n * (n - 1)) - 2.0 * kxy.sum() / (n * m) + offdiag_sum(kyy) / (m * (m - 1));
}

double mmd_from_gram(Estimator e, const Eigen::MatrixXd& kxx, const Eigen::MatrixXd& kxy,
                     const Eigen::MatrixXd& kyy) {
  return e == Estimator::Biased ? mmd_biased(kxx, kxy, kyy) : mmd_unbiased(kxx, kxy, kyy);
}

double ensemble_mmd(const SignatureKernel& k, const PathRefs& x, const PathRefs& y, Estimator e) {
  require(!x.empty() && !y.empty(), ErrorKind::Argument, "empty ensemble");
  if (e == Estimator::Unbiased)
    require(x.size() >= 2 && y.size() >= 2, ErrorKind::Argument,
            "unbiased MMD needs at least 2 samples per side");
  if (all_explicit(x) && all_explicit(y)) return explicit_mmd(x, y, e);
  return mmd_from_gram(e, gram_symmetric(k, x), gram(k, x, y), gram_symmetric(k, y));
}

double mmd_distance(const SignatureKernel& k, const PathRefs& x, const PathRefs& y) {
  return std::sqrt(std::max(0.0, ensemble_mmd(k, x, y, Estimator::Biased)));
}

std::string null_source_name(NullSource s) {
  switch (s) {
    case NullSource::Bootstrap: return "bootstrap";
    case NullSource::Gamma: return "gamma";
    case NullSource::Rolling: return "rolling";
    case NullSource::Permutation: return "permutation";
  }
  return "?";
}

double NullDistribution::cdf(double x) const {
  if (source == NullSource::Gamma) {
    if (x <= 0.0) return 0.0;
    boost::math::gamma_distribution<double> g(shape, scale);
    return boost::math::cdf(g, x * static_cast<double>(n));
  }
  if (samples.empty()) return 0.0;
  auto it = std::upper_bound(samples.begin(), samples.end(), x);
  return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
}

double empirical_quantile(const std::vector<double>& sorted, double q) {
  require(!sorted.empty(), ErrorKind::Argument, "quantile of empty sample");
  require(q > 0.0 && q <= 1.0, ErrorKind::Argument, "quantile level must be in (0, 1]");
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

NullDistribution empirical_null(std::vector<double> samples, double alpha, NullSource source) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::Argument, "alpha must be in (0, 1)");
  NullDistribution d;
  d.source = source;
  d.alpha = alpha;
  std::sort(samples.begin(), samples.end());
  d.samples = std::move(samples);
  d.critical = empirical_quantile(d.samples, 1.0 - alpha);
  return d;
}

NullDistribution bootstrap_null(const SignatureKernel& k, const std::vector<PreparedPath>& bank,
                                std::size_t h2, std::size_t m_pairs, std::uint64_t seed, double alpha,
                                Estimator e) {
  require(h2 >= 2, ErrorKind::Argument, "h2 must be >= 2");
  require(bank.size() >= 2 * h2, ErrorKind::Argument,
          "bank of " + std::to_string(bank.size()) + " paths is too small for two disjoint draws of " +
              std::to_string(h2));
  require(m_pairs >= 1, ErrorKind::Argument, "need at least one bootstrap pair");
  std::vector<double> vals(m_pairs);
  parallel_for(m_pairs, [&](std::size_t m) {
    CounterRng rng(seed, m, 0x6e756c6c);
    auto idx = draw_without_replacement(rng, bank.size(), 2 * h2);
    PathRefs x, y;
    for (std::size_t i = 0; i < h2; ++i) {
      x.push_back(&bank[idx[i]]);
      y.push_back(&bank[idx[h2 + i]]);
    }
    vals[m] = ensemble_mmd(k, x, y, e);
  });
  return empirical_null(std::move(vals), alpha, NullSource::Bootstrap);
}

NullDistribution gamma_threshold(double mean, double var, std::size_t n, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::Argument, "alpha must be in (0, 1)");
  require(n >= 1, ErrorKind::Argument, "gamma sample-size factor must be >= 1");
  require(std::isfinite(mean) && std::isfinite(var) && mean > 0.0 && var > 0.0, ErrorKind::Degenerate,
          "gamma fit needs positive mean and variance");
  NullDistribution d;
  d.source = NullSource::Gamma;
  d.alpha = alpha;
  d.n = n;
  d.shape = mean * mean / var;
  d.scale = static_cast<double>(n) * var / mean;
  boost::math::gamma_distribution<double> g(d.shape, d.scale);
  d.critical = boost::math::quantile(g, 1.0 - alpha) / static_cast<double>(n);
  return d;
}

NullDistribution gamma_threshold(const std::vector<double>& samples, std::size_t n, double alpha) {
  require(samples.size() >= 2, ErrorKind::Argument, "gamma fit needs at least 2 samples");
  double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size() - 1);
  return gamma_threshold(mean, var, n, alpha);
}

NullDistribution permutation_null(const SignatureKernel& k, const PathRefs& x, const PathRefs& y,
                                  std::size_t n_perm, std::uint64_t seed, double alpha, Estimator e) {
  PathRefs pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  Eigen::MatrixXd g = gram_symmetric(k, pooled);
  const std::size_t n = x.size(), m = y.size();
  std::vector<double> vals(n_perm);
  parallel_for(n_perm, [&](std::size_t p) {
    CounterRng rng(seed, p, 0x7065726d);
    auto idx = draw_without_replacement(rng, n + m, n + m);
    Eigen::MatrixXd kxx(n, n), kxy(n, m), kyy(m, m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) kxx(i, j) = g(idx[i], idx[j]);
      for (std::size_t j = 0; j < m; ++j) kxy(i, j) = g(idx[i], idx[n + j]);
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) kyy(i, j) = g(idx[n + i], idx[n + j]);
    vals[p] = mmd_from_gram(e, kxx, kxy, kyy);
  });
  return empirical_null(std::move(vals), alpha, NullSource::Permutation);
}

Verdict two_sample_test(const SignatureKernel& k, const PathRefs& x, const PathRefs& y,
                        const NullDistribution& null, Estimator e) {
  Verdict v;
  v.statistic = ensemble_mmd(k, x, y, e);
  v.critical = null.critical;
  v.reject = v.statistic > v.critical;
  return v;
}

}  // namespace sigregime
