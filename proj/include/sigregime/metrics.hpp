#pragma once

#include <optional>
#include <vector>

namespace sigregime {

// Mann-Whitney AUC, ties count one half; empty if only one class is present.
// Label 1 is the positive class.
std::optional<double> roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct ClassMetrics {
  std::optional<double> on;     // accuracy on label-0 (base) sub-paths
  std::optional<double> off;    // accuracy on label-1 (change) sub-paths
  std::optional<double> total;
  std::optional<double> auc;
  std::size_t n_on = 0, n_off = 0;
};

// Sub-paths with no score are skipped. A score >= threshold predicts a change.
// `auc_scores`, when given, replaces `scores` for the AUC only.
ClassMetrics classification_metrics(const std::vector<std::optional<double>>& scores,
                                    const std::vector<int>& labels, double threshold = 0.5,
                                    const std::vector<std::optional<double>>* auc_scores = nullptr);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
  std::size_t n = 0;
};

Summary summarize(const std::vector<double>& xs);
// Skips empty entries.
Summary summarize(const std::vector<std::optional<double>>& xs);

// Exponential moving average with span n (weight 2/(n+1)), seeded with the
// first defined value; undefined inputs carry the previous average forward.
std::vector<std::optional<double>> ema(const std::vector<std::optional<double>>& xs, std::size_t n);

}  // namespace sigregime
