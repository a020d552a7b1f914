#include "sigregime/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sigregime/error.hpp"

namespace sigregime {

std::optional<double> roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  require(scores.size() == labels.size(), ErrorKind::Shape, "roc_auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // midranks over tied blocks
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) {
        pos_rank_sum += mid;
        ++n_pos;
      }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

ClassMetrics classification_metrics(const std::vector<std::optional<double>>& scores,
                                    const std::vector<int>& labels, double threshold,
                                    const std::vector<std::optional<double>>* auc_scores) {
  require(scores.size() == labels.size(), ErrorKind::Shape, "metrics: scores and labels differ in length");
  if (auc_scores)
    require(auc_scores->size() == labels.size(), ErrorKind::Shape, "metrics: AUC scores differ in length");
  ClassMetrics m;
  std::size_t right_on = 0, right_off = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i]) continue;
    const bool change = *scores[i] >= threshold;
    if (labels[i] == 1) {
      ++m.n_off;
      right_off += change;
    } else {
      ++m.n_on;
      right_on += !change;
    }
  }
  if (m.n_on) m.on = static_cast<double>(right_on) / m.n_on;
  if (m.n_off) m.off = static_cast<double>(right_off) / m.n_off;
  if (m.n_on + m.n_off) m.total = static_cast<double>(right_on + right_off) / (m.n_on + m.n_off);

  const auto& src = auc_scores ? *auc_scores : scores;
  std::vector<double> s;
  std::vector<int> l;
  for (std::size_t i = 0; i < src.size(); ++i)
    if (src[i]) {
      s.push_back(*src[i]);
      l.push_back(labels[i] == 1 ? 1 : 0);
    }
  m.auc = roc_auc(s, l);
  return m;
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (xs.size() - 1));
  }
  return s;
}

Summary summarize(const std::vector<std::optional<double>>& xs) {
  std::vector<double> v;
  for (const auto& x : xs)
    if (x) v.push_back(*x);
  return summarize(v);
}

std::vector<std::optional<double>> ema(const std::vector<std::optional<double>>& xs, std::size_t n) {
  require(n >= 1, ErrorKind::Argument, "ema span must be >= 1");
  const double a = 2.0 / (static_cast<double>(n) + 1.0);
  std::vector<std::optional<double>> out(xs.size());
  std::optional<double> cur;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i]) cur = cur ? a * *xs[i] + (1.0 - a) * *cur : *xs[i];
    out[i] = cur;
  }
  return out;
}

}  // namespace sigregime
