#include "sigregime/scoring.hpp"

#include "sigregime/error.hpp"
#include "sigregime/rng.hpp"

namespace sigregime {

namespace {

void require_rank1(const SignatureKernel& k) {
  require(k.spec().rank == 1, ErrorKind::Config,
          "scoring rules need a rank-1 kernel; rank-2 embeddings do not support set-to-point comparison");
}

}  // namespace

ScoringSample make_scoring_sample(const SignatureKernel& k, PathRefs paths) {
  require_rank1(k);
  require(paths.size() >= 2, ErrorKind::Argument, "kernel score needs at least 2 samples");
  ScoringSample s;
  Eigen::MatrixXd g = gram_symmetric(k, paths);
  double n = static_cast<double>(paths.size());
  s.self_mean = (g.sum() - g.trace()) / (n * (n - 1));
  s.paths = std::move(paths);
  return s;
}

double kernel_score(const SignatureKernel& k, const ScoringSample& s, const PreparedPath& y) {
  double cross = 0.0;
  for (const auto* p : s.paths) cross += k(*p, y);
  return s.self_mean - 2.0 * cross / static_cast<double>(s.paths.size());
}

double kernel_score(const SignatureKernel& k, const PathRefs& p, const PreparedPath& y) {
  return kernel_score(k, make_scoring_sample(k, p), y);
}

double similarity_score(const SignatureKernel& k, const PathRefs& p, const PathRefs& q,
                        const PreparedPath& x) {
  return kernel_score(k, p, x) - kernel_score(k, q, x);
}

Eigen::MatrixXd similarity_from_scores(const std::vector<double>& scores) {
  const std::size_t n = scores.size();
  require(n >= 2, ErrorKind::Argument, "similarity matrix needs at least 2 beliefs");
  Eigen::MatrixXd m(n, n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t col = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) m(i, col++) = scores[i] - scores[j];
  }
  return m;
}

Eigen::MatrixXd similarity_matrix(const SignatureKernel& k,
                                  const std::vector<const std::vector<PreparedPath>*>& banks,
                                  const PreparedPath& x, std::size_t n_samples, std::uint64_t seed) {
  require_rank1(k);
  require(banks.size() >= 2, ErrorKind::Argument, "similarity matrix needs at least 2 beliefs");
  std::vector<double> scores;
  for (std::size_t b = 0; b < banks.size(); ++b) {
    const auto& bank = *banks[b];
    require(bank.size() >= n_samples, ErrorKind::Argument,
            "bank " + std::to_string(b) + " holds " + std::to_string(bank.size()) + " paths, need " +
                std::to_string(n_samples));
    // same index stream for every bank: identical banks give identical samples
    CounterRng rng(seed, 0, 0x73636f7265);
    PathRefs pick;
    for (std::size_t i : draw_without_replacement(rng, bank.size(), n_samples)) pick.push_back(&bank[i]);
    scores.push_back(kernel_score(k, make_scoring_sample(k, std::move(pick)), x));
  }
  return similarity_from_scores(scores);
}

double SimilarityReport::mean_entry(std::size_t i, std::size_t j, std::size_t begin,
                                    std::size_t end) const {
  require(begin < end && end <= matrices.size(), ErrorKind::Range, "bad sub-path range");
  double acc = 0.0;
  for (std::size_t t = begin; t < end; ++t) acc += matrices[t](i, j);
  return acc / static_cast<double>(end - begin);
}

}  // namespace sigregime
