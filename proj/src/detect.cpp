#include "sigregime/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sigregime/error.hpp"
#include "sigregime/parallel.hpp"
#include "sigregime/rng.hpp"

namespace sigregime {

std::vector<const std::vector<PreparedPath>*> Beliefs::banks() const {
  std::vector<const std::vector<PreparedPath>*> out;
  for (const auto& b : items) out.push_back(&b.bank);
  return out;
}

Beliefs simulate_beliefs(const SignatureKernel& k, const std::vector<ModelPair>& models,
                         std::size_t h1, double dt, std::size_t n_paths, const StreamTransformer& phi,
                         std::uint64_t seed) {
  require(!models.empty(), ErrorKind::Argument, "no belief models");
  require(h1 >= 2, ErrorKind::Argument, "h1 must be >= 2");
  Beliefs b;
  b.h1 = h1;
  b.dt = dt;
  b.phi = phi;
  for (std::size_t i = 0; i < models.size(); ++i) {
    auto raw = simulate(models[i], Mesh{dt, h1}, n_paths, derive_seed(seed, i, 0x62656c66));
    Belief bel = empirical_belief(k, models[i].describe(), raw, phi);
    bel.model = models[i];
    b.items.push_back(std::move(bel));
  }
  return b;
}

Belief empirical_belief(const SignatureKernel& k, std::string label, const std::vector<Stream>& raw,
                        const StreamTransformer& phi) {
  Belief b;
  b.label = std::move(label);
  std::vector<Stream> t(raw.size());
  parallel_for(raw.size(), [&](std::size_t i) { t[i] = phi(raw[i]); });
  b.bank = k.prepare_all(t);
  return b;
}

std::vector<PreparedPath> prepare_subpaths(const SignatureKernel& k, const SubPathSet& sp,
                                           const StreamTransformer& phi) {
  std::vector<Stream> t(sp.size());
  parallel_for(sp.size(), [&](std::size_t i) { t[i] = phi(sp.paths[i]); });
  return k.prepare_all(t);
}

BandGram::BandGram(const SignatureKernel& k, const std::vector<PreparedPath>& paths, std::size_t width)
    : n_(paths.size()), w_(width), band_(paths.size() * width, std::numeric_limits<double>::quiet_NaN()) {
  require(width >= 1, ErrorKind::Argument, "band width must be >= 1");
  parallel_for(n_, [&](std::size_t i) {
    for (std::size_t d = 0; d < w_ && i + d < n_; ++d) band_[i * w_ + d] = k(paths[i], paths[i + d]);
  });
}

double BandGram::operator()(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  require(j < n_ && j - i < w_, ErrorKind::Range,
          "pair (" + std::to_string(i) + ", " + std::to_string(j) + ") outside the cached band");
  return band_[i * w_ + (j - i)];
}

double BandGram::block_sum(std::size_t a, std::size_t b, std::size_t n) const {
  double s = 0.0;
  for (std::size_t i = a; i < a + n; ++i)
    for (std::size_t j = b; j < b + n; ++j) s += (*this)(i, j);
  return s;
}

double BandGram::diag_sum(std::size_t a, std::size_t n) const {
  double s = 0.0;
  for (std::size_t i = a; i < a + n; ++i) s += band_[i * w_];
  return s;
}

double band_mmd(const BandGram& g, std::size_t a, std::size_t b, std::size_t h2, Estimator e) {
  const double n = static_cast<double>(h2);
  double xx = g.block_sum(a, a, h2), yy = g.block_sum(b, b, h2), xy = g.block_sum(a, b, h2);
  if (e == Estimator::Biased) return (xx + yy - 2.0 * xy) / (n * n);
  require(h2 >= 2, ErrorKind::Argument, "unbiased MMD needs at least 2 samples per side");
  return (xx - g.diag_sum(a, h2) + yy - g.diag_sum(b, h2)) / (n * (n - 1)) - 2.0 * xy / (n * n);
}

namespace {

// MMD of x against paths drawn from bank, with the x self-sum supplied
double mmd_against_draw(const SignatureKernel& k, const PathRefs& x, double xx_offdiag, double xx_full,
                        const std::vector<PreparedPath>& bank, CounterRng& rng, Estimator e) {
  const std::size_t h2 = x.size();
  require(bank.size() >= h2, ErrorKind::Argument,
          "belief bank holds " + std::to_string(bank.size()) + " paths, ensembles need " + std::to_string(h2));
  auto idx = draw_without_replacement(rng, bank.size(), h2);
  double yy = 0.0, yy_diag = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < h2; ++i) {
    const auto& yi = bank[idx[i]];
    yy_diag += k(yi, yi);
    for (std::size_t j = i + 1; j < h2; ++j) yy += 2.0 * k(yi, bank[idx[j]]);
    for (const auto* xj : x) xy += k(*xj, yi);
  }
  const double n = static_cast<double>(h2);
  if (e == Estimator::Biased) return (xx_full + yy + yy_diag - 2.0 * xy) / (n * n);
  return (xx_offdiag + yy) / (n * (n - 1)) - 2.0 * xy / (n * n);
}

Eigen::VectorXd score_with_self(const SignatureKernel& k, const PathRefs& x, double xx_offdiag,
                                double xx_full, const Beliefs& beliefs, std::size_t n_evals,
                                std::uint64_t seed, Estimator e) {
  require(n_evals >= 1, ErrorKind::Argument, "n_evals must be >= 1");
  Eigen::VectorXd out(beliefs.size());
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    double acc = 0.0;
    for (std::size_t l = 0; l < n_evals; ++l) {
      CounterRng rng(seed, i, l);
      acc += mmd_against_draw(k, x, xx_offdiag, xx_full, beliefs.items[i].bank, rng, e);
    }
    out(i) = acc / static_cast<double>(n_evals);
  }
  return out;
}

}  // namespace

Eigen::VectorXd score_vector(const SignatureKernel& k, const PathRefs& ensemble, const Beliefs& beliefs,
                             std::size_t n_evals, std::uint64_t seed, Estimator e) {
  require(!ensemble.empty(), ErrorKind::Argument, "empty ensemble");
  require(e == Estimator::Biased || ensemble.size() >= 2, ErrorKind::Argument,
          "unbiased MMD needs at least 2 samples per side");
  Eigen::MatrixXd g = gram_symmetric(k, ensemble);
  return score_with_self(k, ensemble, g.sum() - g.trace(), g.sum(), beliefs, n_evals, seed, e);
}

std::vector<NullDistribution> belief_nulls(const SignatureKernel& k, const Beliefs& beliefs,
                                           std::size_t h2, std::size_t m_pairs, std::uint64_t seed,
                                           double alpha, NullSource source, Estimator e) {
  require(source == NullSource::Bootstrap || source == NullSource::Gamma, ErrorKind::Config,
          "belief nulls come from the bootstrap or its gamma fit");
  std::vector<NullDistribution> out;
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    auto boot = bootstrap_null(k, beliefs.items[i].bank, h2, m_pairs, derive_seed(seed, i, 0x6e756c6c), alpha, e);
    out.push_back(source == NullSource::Gamma ? gamma_threshold(boot.samples, h2, alpha) : std::move(boot));
  }
  return out;
}

std::vector<std::optional<double>> exceedance_fractions(const std::vector<std::optional<bool>>& flags,
                                                        std::size_t n_subpaths, std::size_t h2) {
  require(h2 >= 1, ErrorKind::Argument, "h2 must be >= 1");
  std::vector<std::optional<double>> out(n_subpaths);
  for (std::size_t i = 0; i < n_subpaths; ++i) {
    std::size_t hit = 0, seen = 0;
    std::size_t lo = i + 1 >= h2 ? i + 1 - h2 : 0;
    for (std::size_t t = lo; t <= i && t < flags.size(); ++t) {
      if (!flags[t]) continue;
      ++seen;
      hit += *flags[t];
    }
    if (seen) out[i] = static_cast<double>(hit) / static_cast<double>(seen);
  }
  return out;
}

DetectionReport detect_online(const SignatureKernel& k, const std::vector<PreparedPath>& subpaths,
                              std::size_t h2, const Beliefs& beliefs,
                              const std::vector<NullDistribution>& nulls, std::size_t n_evals,
                              std::uint64_t seed, Estimator e) {
  require(beliefs.size() >= 1, ErrorKind::Argument, "no beliefs");
  require(nulls.size() == beliefs.size(), ErrorKind::Argument, "need one null distribution per belief");
  require(h2 >= 1 && subpaths.size() >= h2, ErrorKind::Argument, "fewer sub-paths than h2");
  const std::size_t n2 = subpaths.size() - h2 + 1, kb = beliefs.size();
  BandGram g(k, subpaths, h2);

  DetectionReport r;
  r.n_evals = n_evals;
  r.scores.resize(kb, n2);
  r.quantiles.resize(kb, n2);
  for (const auto& nd : nulls) r.critical.push_back(nd.critical);

  parallel_for(n2, [&](std::size_t t) {
    PathRefs x;
    for (std::size_t i = t; i < t + h2; ++i) x.push_back(&subpaths[i]);
    double full = g.block_sum(t, t, h2);
    r.scores.col(t) = score_with_self(k, x, full - g.diag_sum(t, h2), full, beliefs, n_evals,
                                      derive_seed(seed, t, 0x73636f72), e);
  });

  r.flags.assign(kb, std::vector<bool>(n2));
  r.anomalous.assign(n2, true);
  std::vector<std::optional<bool>> any(n2);
  for (std::size_t t = 0; t < n2; ++t) {
    for (std::size_t i = 0; i < kb; ++i) {
      r.quantiles(i, t) = nulls[i].cdf(r.scores(i, t));
      r.flags[i][t] = r.scores(i, t) > r.critical[i];
      if (!r.flags[i][t]) r.anomalous[t] = false;
    }
    any[t] = r.anomalous[t];
  }
  r.exceedance = exceedance_fractions(any, subpaths.size(), h2);
  return r;
}

std::vector<std::optional<double>> auto_evaluate(const BandGram& g, std::size_t h2,
                                                 const std::vector<std::size_t>& lags,
                                                 std::vector<double> weights, Estimator e) {
  require(!lags.empty(), ErrorKind::Argument, "no lags given");
  if (weights.empty()) weights.assign(lags.size(), 1.0 / static_cast<double>(lags.size()));
  require(weights.size() == lags.size(), ErrorKind::Argument, "one weight per lag");
  const std::size_t max_lag = *std::max_element(lags.begin(), lags.end());
  require(*std::min_element(lags.begin(), lags.end()) >= 1, ErrorKind::Argument, "lags must be >= 1");
  require(g.size() >= h2, ErrorKind::Argument, "fewer sub-paths than h2");
  const std::size_t n2 = g.size() - h2 + 1;
  require(max_lag < n2, ErrorKind::Argument, "largest lag must be below the ensemble count");
  require(g.width() >= h2 + max_lag, ErrorKind::Argument, "cached band too narrow for the lags");
  std::vector<std::optional<double>> out(n2);
  for (std::size_t i = max_lag; i < n2; ++i) {
    double s = 0.0;
    for (std::size_t l = 0; l < lags.size(); ++l) s += weights[l] * band_mmd(g, i - lags[l], i, h2, e);
    out[i] = s;
  }
  return out;
}

std::vector<std::optional<double>> auto_evaluate(const SignatureKernel& k,
                                                 const std::vector<PreparedPath>& subpaths,
                                                 std::size_t h2, const std::vector<std::size_t>& lags,
                                                 std::vector<double> weights, Estimator e) {
  require(!lags.empty(), ErrorKind::Argument, "no lags given");
  BandGram g(k, subpaths, h2 + *std::max_element(lags.begin(), lags.end()));
  return auto_evaluate(g, h2, lags, std::move(weights), e);
}

RollingNull rolling_threshold(const std::vector<std::optional<double>>& scores, std::size_t window,
                              double alpha) {
  require(window >= 2, ErrorKind::Argument, "rolling window must be >= 2");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::Argument, "alpha must lie in (0, 1)");
  const std::size_t n = scores.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  RollingNull r;
  r.window = window;
  r.alpha = alpha;
  r.shape.assign(n, nan);
  r.scale.assign(n, nan);
  r.threshold.assign(n, std::nullopt);
  r.empirical.assign(n, false);
  r.flags.assign(n, std::nullopt);
  r.burn_in = n;

  std::size_t run = 0;  // consecutive defined scores ending at t-1
  for (std::size_t t = 0; t < n; ++t) {
    if (run >= window && scores[t]) {
      if (r.burn_in == n) r.burn_in = t;
      std::vector<double> w;
      w.reserve(window);
      for (std::size_t i = t - window; i < t; ++i) w.push_back(*scores[i]);
      double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(window);
      double var = 0.0;
      for (double v : w) var += (v - mean) * (v - mean);
      var /= static_cast<double>(window - 1);
      double c;
      if (mean > 0.0 && var > 0.0) {
        auto gm = gamma_threshold(mean, var, window, alpha);
        r.shape[t] = gm.shape;
        r.scale[t] = gm.scale;
        c = gm.critical;
      } else {
        std::sort(w.begin(), w.end());
        c = empirical_quantile(w, 1.0 - alpha);
        r.empirical[t] = true;
      }
      r.threshold[t] = c;
      r.flags[t] = *scores[t] > c;
    }
    run = scores[t] ? run + 1 : 0;
  }
  return r;
}

PathwiseReport pathwise_detect(const SignatureKernel& k, const std::vector<Stream>& raw_subpaths,
                               const Beliefs& beliefs, const PathwiseOptions& opt) {
  require(beliefs.size() >= 2, ErrorKind::Argument, "path-wise detection needs at least 2 beliefs");
  require(opt.n_samples >= 2, ErrorKind::Argument, "kernel scores need at least 2 samples");
  if (opt.conditional)
    for (const auto& b : beliefs.items)
      require(b.model.has_value(), ErrorKind::Config,
              "conditional sampling needs a generating model for belief '" + b.label + "'");

  PathwiseReport r;
  r.similarity.n_samples = opt.n_samples;
  r.similarity.seed = opt.seed;
  r.similarity.matrices.resize(raw_subpaths.size());
  parallel_for(raw_subpaths.size(), [&](std::size_t j) {
    const Stream& raw = raw_subpaths[j];
    PreparedPath x = k.prepare(beliefs.phi(raw));
    const std::uint64_t wseed = derive_seed(opt.seed, j, 0x70617468);
    if (!opt.conditional) {
      r.similarity.matrices[j] = similarity_matrix(k, beliefs.banks(), x, opt.n_samples, wseed);
      return;
    }
    std::vector<double> start(raw.value(0).begin(), raw.value(0).end());
    std::vector<double> scores;
    for (std::size_t i = 0; i < beliefs.size(); ++i) {
      const ModelPair& m = *beliefs.items[i].model;
      require(m.channels() == raw.dim(), ErrorKind::Shape,
              "belief '" + beliefs.items[i].label + "' emits " + std::to_string(m.channels()) +
                  " channels, observed path has " + std::to_string(raw.dim()));
      Mesh mesh{beliefs.dt, raw.size(), raw.time(0)};
      auto sims = simulate(m, mesh, opt.n_samples, derive_seed(wseed, i, 0x636f6e64), &start);
      for (auto& s : sims) s = beliefs.phi(s);
      auto prepared = k.prepare_all(sims);
      scores.push_back(kernel_score(k, make_scoring_sample(k, refs_of(prepared)), x));
    }
    r.similarity.matrices[j] = similarity_from_scores(scores);
  });

  r.flags.resize(raw_subpaths.size());
  for (std::size_t j = 0; j < raw_subpaths.size(); ++j) r.flags[j] = r.similarity.matrices[j].row(0).mean() > 0.0;
  return r;
}

}  // namespace sigregime
