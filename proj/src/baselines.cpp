#include "sigregime/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sigregime/error.hpp"
#include "sigregime/mmd.hpp"
#include "sigregime/parallel.hpp"
#include "sigregime/rng.hpp"

namespace sigregime {

namespace {

void interleave(const Word& u, const Word& v, std::size_t i, std::size_t j, Word& cur,
                std::map<Word, long>& acc) {
  if (i == u.size() && j == v.size()) {
    ++acc[cur];
    return;
  }
  if (i < u.size()) {
    cur.push_back(u[i]);
    interleave(u, v, i + 1, j, cur, acc);
    cur.pop_back();
  }
  if (j < v.size()) {
    cur.push_back(v[j]);
    interleave(u, v, i, j + 1, cur, acc);
    cur.pop_back();
  }
}

// sum of es over all interleavings, tracking the flat index as letters append
double shuffle_pair(const std::vector<int>& u, const std::vector<int>& v, std::size_t i, std::size_t j,
                    std::size_t idx, std::size_t d, std::span<const double> level) {
  if (i == u.size() && j == v.size()) return level[idx];
  double s = 0.0;
  if (i < u.size()) s += shuffle_pair(u, v, i + 1, j, idx * d + u[i], d, level);
  if (j < v.size()) s += shuffle_pair(u, v, i, j + 1, idx * d + v[j], d, level);
  return s;
}

std::vector<Word> basis(std::size_t d, std::size_t order) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (std::size_t k = 1; k <= order; ++k) {
    std::size_t end = out.size();
    for (std::size_t w = begin; w < end; ++w)
      for (std::size_t a = 0; a < d; ++a) {
        Word x = out[w];
        x.push_back(static_cast<int>(a));
        out.push_back(std::move(x));
      }
    begin = end;
  }
  return out;
}

}  // namespace

std::vector<std::pair<Word, long>> shuffle_product(const Word& u, const Word& v) {
  std::map<Word, long> acc;
  Word cur;
  interleave(u, v, 0, 0, cur, acc);
  // all results share one length, so map order is already lexicographic
  return {acc.begin(), acc.end()};
}

std::size_t word_index(const Word& w, std::size_t d) {
  std::size_t idx = 0;
  for (int a : w) {
    require(a >= 0 && static_cast<std::size_t>(a) < d, ErrorKind::Range, "letter outside the alphabet");
    idx = idx * d + static_cast<std::size_t>(a);
  }
  return tensor_size(d, w.size()) - static_cast<std::size_t>(std::pow(d, w.size())) + idx;
}

VarianceNormModel variance_norm_model(const TensorSeries& expected, std::size_t order, bool allow_pinv,
                                      double cutoff) {
  const std::size_t d = expected.dim();
  require(order >= 1, ErrorKind::Argument, "variance norm order must be >= 1");
  require(expected.order() >= 2 * order, ErrorKind::Argument,
          "expected signature must reach order " + std::to_string(2 * order));
  require(tensor_size(d, 2 * order) <= kSigconCapacity, ErrorKind::Capacity,
          "order-" + std::to_string(2 * order) + " signature over " + std::to_string(d) + " letters exceeds " +
              std::to_string(kSigconCapacity) + " entries");
  auto words = basis(d, order);
  const std::size_t n = words.size();
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      a(i, j) = a(j, i) =
          shuffle_pair(words[i], words[j], 0, 0, 0, d, expected.level(words[i].size() + words[j].size()));
  return variance_norm_from_matrix(std::move(a), order, d, allow_pinv, cutoff);
}

VarianceNormModel variance_norm_from_matrix(Eigen::MatrixXd a, std::size_t order, std::size_t dim,
                                            bool allow_pinv, double cutoff) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  require(a.rows() == a.cols() && n == tensor_size(dim, order), ErrorKind::Shape,
          "matrix size does not match the word basis");
  VarianceNormModel m;
  m.order = order;
  m.dim = dim;
  m.a = std::move(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.a);
  require(es.info() == Eigen::Success, ErrorKind::Numeric, "eigendecomposition of the shuffle matrix failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < n; ++i)
    if (lam(i) > cutoff * top) {
      inv(i) = 1.0 / lam(i);
      ++m.rank;
    }
  m.pseudo_inverse = m.rank < n;
  require(allow_pinv || !m.pseudo_inverse, ErrorKind::Numeric,
          "shuffle matrix is singular (rank " + std::to_string(m.rank) + " of " + std::to_string(n) +
              "); enable the pseudo-inverse");
  const Eigen::MatrixXd& q = es.eigenvectors();
  m.inverse = q * inv.asDiagonal() * q.transpose();
  m.whiten = inv.cwiseSqrt().asDiagonal() * q.transpose();
  return m;
}

Eigen::VectorXd signature_vector(const Stream& s, std::size_t order) {
  auto sig = truncated_signature(s, order, false);
  return Eigen::Map<const Eigen::VectorXd>(sig.data().data(), static_cast<Eigen::Index>(sig.data().size()));
}

VarianceNormModel variance_norm_model(const std::vector<Stream>& corpus, std::size_t order, bool allow_pinv) {
  require(!corpus.empty(), ErrorKind::Argument, "empty corpus");
  require(tensor_size(corpus[0].dim(), 2 * order) <= kSigconCapacity, ErrorKind::Capacity,
          "order-" + std::to_string(2 * order) + " signature over " + std::to_string(corpus[0].dim()) +
              " letters exceeds " + std::to_string(kSigconCapacity) + " entries");
  return variance_norm_model(expected_signature(corpus, 2 * order, false), order, allow_pinv);
}

double variance_norm(const Eigen::VectorXd& w, const VarianceNormModel& m) {
  require(w.size() == m.inverse.rows(), ErrorKind::Shape, "vector length does not match the model");
  return (m.whiten * w).squaredNorm();
}

double conformance(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& corpus,
                   const VarianceNormModel& m) {
  require(!corpus.empty(), ErrorKind::Argument, "empty corpus");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : corpus) best = std::min(best, variance_norm(x - y, m));
  return std::sqrt(best);
}

double conformance_whitened(const Eigen::VectorXd& zx, const Eigen::MatrixXd& zcorpus) {
  require(zcorpus.cols() > 0, ErrorKind::Argument, "empty corpus");
  return std::sqrt((zcorpus.colwise() - zx).colwise().squaredNorm().minCoeff());
}

SigconResult sigcon_detect(const std::vector<Stream>& paths, const std::vector<Stream>& corpus,
                           std::size_t order, double alpha, std::uint64_t seed) {
  require(corpus.size() >= 4, ErrorKind::Argument, "SIG-CON corpus needs at least 4 paths");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::Argument, "alpha must lie in (0, 1)");
  CounterRng rng(seed, 0, 0x736967636f6e);
  auto perm = draw_without_replacement(rng, corpus.size(), corpus.size());
  const std::size_t half = corpus.size() / 2;
  std::vector<Stream> first, second;
  for (std::size_t i = 0; i < half; ++i) first.push_back(corpus[perm[i]]);
  for (std::size_t i = half; i < 2 * half; ++i) second.push_back(corpus[perm[i]]);

  SigconResult r;
  r.model = variance_norm_model(second, order);
  const auto& w = r.model.whiten;
  auto project = [&](const std::vector<Stream>& v) {
    Eigen::MatrixXd z(w.rows(), static_cast<Eigen::Index>(v.size()));
    parallel_for(v.size(), [&](std::size_t i) { z.col(i) = w * signature_vector(v[i], order); });
    return z;
  };
  const Eigen::MatrixXd ref = project(second), z1 = project(first), zx = project(paths);
  r.null_samples.resize(half);
  parallel_for(half, [&](std::size_t i) { r.null_samples[i] = conformance_whitened(z1.col(i), ref); });
  std::sort(r.null_samples.begin(), r.null_samples.end());
  r.threshold = empirical_quantile(r.null_samples, 1.0 - alpha);
  r.scores.resize(paths.size());
  parallel_for(paths.size(), [&](std::size_t i) { r.scores[i] = conformance_whitened(zx.col(i), ref); });
  r.flags.resize(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) r.flags[i] = r.scores[i] > r.threshold;
  return r;
}

}  // namespace sigregime
