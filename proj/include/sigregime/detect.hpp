#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigregime/mmd.hpp"
#include "sigregime/models.hpp"
#include "sigregime/scoring.hpp"
#include "sigregime/sigkernel.hpp"
#include "sigregime/streams.hpp"

namespace sigregime {

struct Belief {
  std::string label;
  std::optional<ModelPair> model;  // empty for banks built from observed data
  std::vector<PreparedPath> bank;
};

// Banks share h1, dt and the transform applied to evaluated data.
struct Beliefs {
  std::vector<Belief> items;
  std::size_t h1 = 0;
  double dt = 0.0;
  StreamTransformer phi;

  std::size_t size() const { return items.size(); }
  std::vector<const std::vector<PreparedPath>*> banks() const;
};

// n_paths sub-paths of h1 observations per model, transformed and prepared.
Beliefs simulate_beliefs(const SignatureKernel& k, const std::vector<ModelPair>& models,
                         std::size_t h1, double dt, std::size_t n_paths, const StreamTransformer& phi,
                         std::uint64_t seed);
Belief empirical_belief(const SignatureKernel& k, std::string label, const std::vector<Stream>& raw,
                        const StreamTransformer& phi);

std::vector<PreparedPath> prepare_subpaths(const SignatureKernel& k, const SubPathSet& sp,
                                           const StreamTransformer& phi);

// Kernel values between sub-paths i, j with |i - j| < width, each computed
// once. Ensembles of consecutive sub-paths read their Gram blocks from here.
class BandGram {
 public:
  BandGram(const SignatureKernel& k, const std::vector<PreparedPath>& paths, std::size_t width);

  std::size_t size() const { return n_; }
  std::size_t width() const { return w_; }
  double operator()(std::size_t i, std::size_t j) const;
  // sum over i in [a, a+n), j in [b, b+n)
  double block_sum(std::size_t a, std::size_t b, std::size_t n) const;
  double diag_sum(std::size_t a, std::size_t n) const;

 private:
  std::size_t n_, w_;
  std::vector<double> band_;  // row i holds j = i .. i+w-1
};

// MMD between the ensembles starting at sub-paths a and b.
double band_mmd(const BandGram& g, std::size_t a, std::size_t b, std::size_t h2, Estimator e);

// Entry i: mean over n_evals of the MMD between the ensemble and h2 paths
// drawn from bank i.
Eigen::VectorXd score_vector(const SignatureKernel& k, const PathRefs& ensemble, const Beliefs& beliefs,
                             std::size_t n_evals, std::uint64_t seed, Estimator e = Estimator::Unbiased);

std::vector<NullDistribution> belief_nulls(const SignatureKernel& k, const Beliefs& beliefs,
                                           std::size_t h2, std::size_t m_pairs, std::uint64_t seed,
                                           double alpha, NullSource source = NullSource::Bootstrap,
                                           Estimator e = Estimator::Unbiased);

// Share of flagged ensembles among those containing each sub-path; empty for
// sub-paths no defined ensemble covers.
std::vector<std::optional<double>> exceedance_fractions(const std::vector<std::optional<bool>>& flags,
                                                        std::size_t n_subpaths, std::size_t h2);

struct DetectionReport {
  Eigen::MatrixXd scores;     // k x N2
  Eigen::MatrixXd quantiles;  // null cdf at each score
  std::vector<double> critical;
  std::size_t n_evals = 0;
  std::vector<std::vector<bool>> flags;  // [belief][ensemble]: score above critical
  std::vector<bool> anomalous;           // above the critical value of every belief
  std::vector<std::optional<double>> exceedance;  // per sub-path
};

DetectionReport detect_online(const SignatureKernel& k, const std::vector<PreparedPath>& subpaths,
                              std::size_t h2, const Beliefs& beliefs,
                              const std::vector<NullDistribution>& nulls, std::size_t n_evals,
                              std::uint64_t seed, Estimator e = Estimator::Unbiased);

// sum_l w_l D(s^{i-l}, s^i), defined for i >= max(lags). Uniform weights when
// `weights` is empty.
std::vector<std::optional<double>> auto_evaluate(const BandGram& g, std::size_t h2,
                                                 const std::vector<std::size_t>& lags,
                                                 std::vector<double> weights = {},
                                                 Estimator e = Estimator::Unbiased);
std::vector<std::optional<double>> auto_evaluate(const SignatureKernel& k,
                                                 const std::vector<PreparedPath>& subpaths,
                                                 std::size_t h2, const std::vector<std::size_t>& lags,
                                                 std::vector<double> weights = {},
                                                 Estimator e = Estimator::Unbiased);

struct RollingNull {
  std::size_t window = 0;
  double alpha = 0.05;
  std::size_t burn_in = 0;  // first index that can be flagged
  std::vector<double> shape, scale;             // NaN where no fit was made
  std::vector<std::optional<double>> threshold;
  std::vector<bool> empirical;  // window fell back to its empirical quantile
  std::vector<std::optional<bool>> flags;
};

// At t the trailing `window` scores strictly before t are moment-matched to a
// gamma law; flags where score_t exceeds its (1 - alpha) quantile. Windows with
// nonpositive mean or zero variance use the empirical quantile instead.
RollingNull rolling_threshold(const std::vector<std::optional<double>>& scores, std::size_t window,
                              double alpha);

struct PathwiseOptions {
  std::size_t n_samples = 64;
  bool conditional = false;
  std::uint64_t seed = 0;
};

struct PathwiseReport {
  SimilarityReport similarity;
  std::vector<bool> flags;  // mean of the first belief's row is positive
};

// Scores each raw sub-path against samples from every belief. In conditional
// mode samples are simulated afresh per window from the observed state at the
// window start.
PathwiseReport pathwise_detect(const SignatureKernel& k, const std::vector<Stream>& raw_subpaths,
                               const Beliefs& beliefs, const PathwiseOptions& opt);

}  // namespace sigregime
