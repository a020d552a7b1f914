#include "sigregime/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sigregime/error.hpp"
#include "sigregime/parallel.hpp"

namespace sigregime {

namespace {

double block_sum(const Eigen::MatrixXd& g, std::size_t a, std::size_t b, std::size_t n) {
  return g.block(a, b, n, n).sum();
}

}  // namespace

Eigen::MatrixXd distance_matrix(const SignatureKernel& k, const std::vector<PathRefs>& ensembles) {
  const std::size_t n = ensembles.size();
  require(n >= 2, ErrorKind::Argument, "distance matrix needs at least 2 ensembles");
  std::vector<double> self(n);
  parallel_for(n, [&](std::size_t i) { self[i] = gram_symmetric(k, ensembles[i]).mean(); });
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double cross = gram(k, ensembles[i], ensembles[j]).mean();
      d(i, j) = std::sqrt(std::max(0.0, self[i] + self[j] - 2.0 * cross));
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  return d;
}

Eigen::MatrixXd distance_matrix(const SignatureKernel& k, const std::vector<PreparedPath>& subpaths,
                                std::size_t h2) {
  require(h2 >= 1 && subpaths.size() >= h2 + 1, ErrorKind::Argument,
          "distance matrix needs at least 2 ensembles");
  const std::size_t n = subpaths.size() - h2 + 1;
  const Eigen::MatrixXd g = gram_symmetric(k, refs_of(subpaths));
  const double norm = static_cast<double>(h2 * h2);
  std::vector<double> self(n);
  for (std::size_t i = 0; i < n; ++i) self[i] = block_sum(g, i, i, h2) / norm;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j)
      d(i, j) = std::sqrt(std::max(0.0, self[i] + self[j] - 2.0 * block_sum(g, i, j, h2) / norm));
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  return d;
}

Linkage parse_linkage(const std::string& s) {
  if (s == "max" || s == "complete") return Linkage::Max;
  if (s == "min" || s == "single") return Linkage::Min;
  if (s == "average") return Linkage::Average;
  fail(ErrorKind::Config, "unknown linkage '" + s + "' (expected max, min or average)");
}

std::string linkage_name(Linkage l) {
  switch (l) {
    case Linkage::Max: return "max";
    case Linkage::Min: return "min";
    case Linkage::Average: return "average";
  }
  return "?";
}

ClusterAssignment agglomerate(const Eigen::MatrixXd& d, int k, Linkage linkage) {
  const std::size_t n = static_cast<std::size_t>(d.rows());
  require(d.rows() == d.cols(), ErrorKind::Shape, "distance matrix must be square");
  require(k >= 1 && static_cast<std::size_t>(k) <= n, ErrorKind::Argument,
          "cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  Eigen::MatrixXd c = d;
  std::vector<std::size_t> size(n, 1), owner(n);
  std::iota(owner.begin(), owner.end(), 0);
  std::vector<bool> alive(n, true);
  ClusterAssignment out;
  out.linkage = linkage;
  out.k = k;

  for (std::size_t clusters = n; clusters > static_cast<std::size_t>(k); --clusters) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j)
        if (alive[j] && c(i, j) < best) {
          best = c(i, j);
          bi = i;
          bj = j;
        }
    }
    for (std::size_t m = 0; m < n; ++m) {
      if (!alive[m] || m == bi || m == bj) continue;
      double v;
      switch (linkage) {
        case Linkage::Max: v = std::max(c(bi, m), c(bj, m)); break;
        case Linkage::Min: v = std::min(c(bi, m), c(bj, m)); break;
        default:
          v = (size[bi] * c(bi, m) + size[bj] * c(bj, m)) / static_cast<double>(size[bi] + size[bj]);
      }
      c(bi, m) = c(m, bi) = v;
    }
    alive[bj] = false;
    size[bi] += size[bj];
    for (auto& o : owner)
      if (o == bj) o = bi;
    out.merges.push_back({bi, bj, best, size[bi]});
  }

  out.labels.assign(n, -1);
  std::vector<int> slot_label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (slot_label[owner[i]] < 0) slot_label[owner[i]] = next++;
    out.labels[i] = slot_label[owner[i]];
  }
  return out;
}

std::vector<std::optional<double>> assign_subpath_labels(const std::vector<int>& ensemble_labels,
                                                         std::size_t n_subpaths, std::size_t h2) {
  require(h2 >= 1, ErrorKind::Argument, "h2 must be >= 1");
  std::vector<std::optional<double>> out(n_subpaths);
  for (std::size_t i = 0; i < n_subpaths; ++i) {
    double acc = 0.0;
    std::size_t seen = 0;
    std::size_t lo = i + 1 >= h2 ? i + 1 - h2 : 0;
    for (std::size_t t = lo; t <= i && t < ensemble_labels.size(); ++t) {
      acc += ensemble_labels[t];
      ++seen;
    }
    if (seen) out[i] = acc / static_cast<double>(seen);
  }
  return out;
}

double permutation_accuracy(const std::vector<std::optional<double>>& predicted,
                            const std::vector<int>& truth, int k) {
  require(k >= 1 && k <= 8, ErrorKind::Argument, "permutation search supports 1..8 labels");
  const std::size_t n = std::min(predicted.size(), truth.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    std::size_t hit = 0, seen = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!predicted[i]) continue;
      int label = std::clamp(static_cast<int>(std::lround(*predicted[i])), 0, k - 1);
      hit += perm[label] == truth[i];
      ++seen;
    }
    if (seen) best = std::max(best, static_cast<double>(hit) / static_cast<double>(seen));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace sigregime
