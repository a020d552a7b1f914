#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigregime/streams.hpp"

namespace sigregime {

enum class Family { Gbm, Merton, RBergomi };

// theta: gBm (mu, sigma); Merton (mu, sigma, lambda, gamma, delta);
// rBergomi (xi0, eta, rho, H). With emit_vol the stream carries d price
// channels followed by d variance channels (gBm and Merton emit the constant
// diffusive sigma^2).
struct ModelPair {
  Family family = Family::Gbm;
  std::vector<double> theta{0.0, 0.2};
  std::size_t dim = 1;
  bool emit_vol = false;

  void validate() const;
  std::size_t channels() const { return emit_vol ? 2 * dim : dim; }
  std::string describe() const;
};

Family parse_family(const std::string& s);
std::string family_name(Family f);

struct Mesh {
  double dt = 1.0 / 252.0;
  std::size_t n_obs = 2;
  double t0 = 0.0;
};

std::vector<Stream> simulate_gbm(double mu, double sigma, std::size_t d, const Mesh& mesh,
                                 std::size_t n_paths, double x0, std::uint64_t seed);

struct MertonParams {
  double mu = 0.0, sigma = 0.2, lambda = 0.0, gamma = 0.0, delta = 0.0;
};
std::vector<Stream> simulate_merton(const MertonParams& p, std::size_t d, const Mesh& mesh,
                                    std::size_t n_paths, double x0, std::uint64_t seed);

struct RBergomiParams {
  double xi0 = 0.04, eta = 1.0, rho = -0.7, hurst = 0.1;
};
struct RBergomiPaths {
  std::vector<Stream> price;
  std::vector<Stream> variance;
  std::vector<Stream> volterra;  // the driving process Y
};
RBergomiPaths simulate_rbergomi(const RBergomiParams& p, std::size_t d, const Mesh& mesh,
                                std::size_t n_paths, std::uint64_t seed, double x0 = 1.0,
                                const std::vector<double>& xi0_per_asset = {});

// Cov(Y_s, Y_t) of the Volterra process sqrt(2H) int_0^s (s-u)^(H-1/2) dB_u.
double volterra_covariance(double s, double t, double hurst);

// Unified entry point. `start` (optional, one value per channel) replaces the
// initial prices and, for rBergomi with emit_vol, the forward variance level.
std::vector<Stream> simulate(const ModelPair& m, const Mesh& mesh, std::size_t n_paths,
                             std::uint64_t seed, const std::vector<double>* start = nullptr);

enum class SwitchMode { Poisson, FixedDuration };

struct RegimeSwitchSpec {
  std::vector<ModelPair> models;  // cycled; even segments are "base", odd are "change"
  std::size_t h1 = 7;
  double lambda1 = 2.0;
  double lambda2 = 1.0 / 49.0;
  SwitchMode mode = SwitchMode::Poisson;
  std::size_t duration = 0;          // fixed mode: observations per change
  std::size_t n_changes = 1;         // fixed mode, when entries is empty
  std::vector<std::size_t> entries;  // fixed mode: explicit entry indices
  double horizon = 4.0;
  double dt = 1.0 / 1764.0;
  double x0 = 1.0;
  bool lattice_aligned = false;
  std::uint64_t seed = 0;
};

struct RegimePath {
  Stream path;
  std::vector<int> labels;       // per observation: 0 base, 1 change
  std::vector<int> model_index;  // per observation, index into models
  std::vector<std::size_t> tau;  // switch indices
};

RegimePath simulate_regime_switching(const RegimeSwitchSpec& spec);

// Label of each length-h1 sub-path: majority over the observations that end
// its internal increments (ties go to the last one).
std::vector<int> subpath_labels(const std::vector<int>& labels, std::size_t h1);

}  // namespace sigregime
