#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "sigregime/signature.hpp"
#include "sigregime/streams.hpp"

namespace sigregime {

using Word = std::vector<int>;  // letters 0..d-1

// All interleavings of u and v keeping each word's order, with multiplicity.
// Sorted by length, then lexicographically.
std::vector<std::pair<Word, long>> shuffle_product(const Word& u, const Word& v);

// Position of a word in the level-ordered, lexicographic signature basis.
std::size_t word_index(const Word& w, std::size_t d);

// Second-moment form on truncated signatures: A_ij = <e_i sh e_j, E S^{2N}>.
// Words are ordered by length, then lexicographically.
struct VarianceNormModel {
  std::size_t order = 0, dim = 0;
  Eigen::MatrixXd a;
  Eigen::MatrixXd inverse;  // pseudo-inverse, PSD-projected
  Eigen::MatrixXd whiten;   // rows map w to coordinates whose squared norm is <w, inverse w>
  bool pseudo_inverse = false;  // A was rank-deficient at the cutoff
  std::size_t rank = 0;
};

constexpr std::size_t kSigconCapacity = 1'000'000;

// From an explicit symmetric matrix over the order-N word basis.
VarianceNormModel variance_norm_from_matrix(Eigen::MatrixXd a, std::size_t order, std::size_t dim,
                                            bool allow_pinv = true, double cutoff = 1e-10);
// From an expected signature of order at least 2N. With allow_pinv false a
// rank-deficient A is a numeric error.
VarianceNormModel variance_norm_model(const TensorSeries& expected, std::size_t order,
                                      bool allow_pinv = true, double cutoff = 1e-10);
VarianceNormModel variance_norm_model(const std::vector<Stream>& corpus, std::size_t order,
                                      bool allow_pinv = true);

double variance_norm(const Eigen::VectorXd& w, const VarianceNormModel& m);

Eigen::VectorXd signature_vector(const Stream& s, std::size_t order);

// min over the corpus of sqrt(variance_norm(x - y)).
double conformance(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& corpus,
                   const VarianceNormModel& m);

// Corpus already mapped through the whitening matrix; squared distances are
// plain Euclidean there.
double conformance_whitened(const Eigen::VectorXd& zx, const Eigen::MatrixXd& zcorpus);

struct SigconResult {
  double threshold = 0.0;
  std::vector<double> null_samples;  // sorted
  std::vector<double> scores;        // per evaluated path
  std::vector<bool> flags;
  VarianceNormModel model;
};

// Splits the corpus at random into halves; the model and reference set come
// from the second half, the null from conformances of the first half.
SigconResult sigcon_detect(const std::vector<Stream>& paths, const std::vector<Stream>& corpus,
                           std::size_t order, double alpha, std::uint64_t seed);

}  // namespace sigregime
