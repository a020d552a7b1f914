#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigregime/config.hpp"
#include "sigregime/metrics.hpp"

#include "json.hpp"

namespace sigregime {

// One comma-separated series file; empty cells for undefined values.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
};

struct MethodResult {
  std::string name;
  std::vector<ClassMetrics> runs;  // empty when the method is not a classifier
  std::map<std::string, std::vector<double>> values;  // other per-run numbers
  std::vector<double> seconds;     // wall clock per run
  double setup_seconds = 0.0;      // belief banks and nulls, shared by all runs

  Summary total() const;
  Summary on() const;
  Summary off() const;
  Summary auc() const;
  Summary seconds_summary() const { return summarize(seconds); }
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<MethodResult> methods;
  nlohmann::json details;  // experiment-specific, deterministic
  std::vector<Table> tables;

  const MethodResult& method(const std::string& name) const;
  nlohmann::json metrics_json() const;  // deterministic part only
  nlohmann::json report_json() const;   // resolved config + metrics + details
  nlohmann::json timing_json() const;
  std::string report_text() const;
};

ExperimentResult run_experiment(const ExperimentConfig& c);
// Belief banks and their null distributions only.
ExperimentResult run_bootstrap_null(const ExperimentConfig& c);

// report.txt, report.json, metrics.json, config.resolved.json, one CSV per
// table and timing.json (the only file that varies between reruns).
void write_artifacts(const ExperimentResult& r, const std::string& dir);

}  // namespace sigregime
