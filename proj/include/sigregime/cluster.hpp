#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "sigregime/sigkernel.hpp"

namespace sigregime {

// Biased-MMD distances (square-root form) between every pair of ensembles;
// each unordered pair is computed once and mirrored.
Eigen::MatrixXd distance_matrix(const SignatureKernel& k, const std::vector<PathRefs>& ensembles);
// Ensembles of h2 consecutive sub-paths, sharing one sub-path Gram matrix.
Eigen::MatrixXd distance_matrix(const SignatureKernel& k, const std::vector<PreparedPath>& subpaths,
                                std::size_t h2);

enum class Linkage { Max, Min, Average };

Linkage parse_linkage(const std::string& s);
std::string linkage_name(Linkage l);

struct Merge {
  std::size_t a, b;  // surviving and absorbed cluster slots (slot = smallest member index)
  double height;
  std::size_t size;
};

struct ClusterAssignment {
  std::vector<int> labels;  // per item, numbered by first appearance
  Linkage linkage = Linkage::Average;
  std::vector<Merge> merges;
  int k = 0;
};

// Repeatedly merges the closest pair of clusters until k remain. Ties go to
// the lexicographically smallest slot pair.
ClusterAssignment agglomerate(const Eigen::MatrixXd& d, int k, Linkage linkage);

// Mean ensemble label over the ensembles holding each sub-path.
std::vector<std::optional<double>> assign_subpath_labels(const std::vector<int>& ensemble_labels,
                                                         std::size_t n_subpaths, std::size_t h2);

// Accuracy of rounded average labels against truth, maximised over label
// permutations; sub-paths without a label are skipped.
double permutation_accuracy(const std::vector<std::optional<double>>& predicted,
                            const std::vector<int>& truth, int k);

}  // namespace sigregime
