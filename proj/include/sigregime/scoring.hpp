#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sigregime/sigkernel.hpp"

namespace sigregime {

// Unbiased estimate of the kernel score of y against samples of P:
// mean_{i != j} k(x_i, x_j) - 2 mean_i k(x_i, y). Lower is better.
double kernel_score(const SignatureKernel& k, const PathRefs& p, const PreparedPath& y);

// s(P, x) - s(Q, x); negative means x looks more like P.
double similarity_score(const SignatureKernel& k, const PathRefs& p, const PathRefs& q,
                        const PreparedPath& x);

// Samples drawn from one bank with their off-diagonal self-Gram mean, reused
// for every point evaluated against them.
struct ScoringSample {
  PathRefs paths;
  double self_mean = 0.0;
};

ScoringSample make_scoring_sample(const SignatureKernel& k, PathRefs paths);
double kernel_score(const SignatureKernel& k, const ScoringSample& s, const PreparedPath& y);

// Row i lists s_i - s_j for every j != i in bank order; k x (k-1).
Eigen::MatrixXd similarity_from_scores(const std::vector<double>& scores);

// Draws n_samples from each bank once (deterministic in seed) and scores x.
Eigen::MatrixXd similarity_matrix(const SignatureKernel& k,
                                  const std::vector<const std::vector<PreparedPath>*>& banks,
                                  const PreparedPath& x, std::size_t n_samples, std::uint64_t seed);

struct SimilarityReport {
  std::vector<Eigen::MatrixXd> matrices;  // one per sub-path, k x (k-1)
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  // mean of entry (i, j) over sub-paths [begin, end)
  double mean_entry(std::size_t i, std::size_t j, std::size_t begin, std::size_t end) const;
};

}  // namespace sigregime
