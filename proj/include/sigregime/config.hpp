#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigregime/cluster.hpp"
#include "sigregime/mmd.hpp"
#include "sigregime/models.hpp"
#include "sigregime/sigkernel.hpp"
#include "sigregime/streams.hpp"

#include "json.hpp"

namespace sigregime {

enum class ExperimentKind {
  ToyDetect,
  Multiclass,
  SinglePath,
  RBergomiDetect,
  Rank2Compare,
  BaselineCompare,
  NonMarkov,
  Cluster,
  RealdataAuto,
  RealdataPipeline,
};

std::string kind_name(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct NullConfig {
  NullSource source = NullSource::Bootstrap;
  std::size_t pairs = 1000;
};

struct CsvConfig {
  std::string path;
  std::string time_column;           // empty: first column
  std::vector<std::string> columns;  // empty: every other column
  double max_bad_fraction = 0.01;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ToyDetect;
  std::uint64_t seed = 0;
  std::size_t n_runs = 1;
  int threads = 0;  // 0 keeps the environment default
  std::string out_dir = "out";

  std::size_t h1 = 7, h2 = 10;
  std::vector<std::string> transforms{"incr", "time", "norm"};
  std::vector<double> scale;  // lambda for a "scale" entry

  KernelSpec kernel;
  // rank2-compare: the rank-2 detector; baseline-compare: the truncated one
  std::optional<KernelSpec> compare_kernel;

  double alpha = 0.05;
  Estimator estimator = Estimator::Unbiased;
  NullConfig null;
  std::size_t n_evals = 1;
  std::size_t bank_size = 10000;

  RegimeSwitchSpec path;  // its seed is replaced per run
  std::vector<ModelPair> beliefs;

  // auto evaluator
  std::vector<std::size_t> lags{1};
  std::vector<double> weights;
  std::size_t window = 0;

  // scoring
  std::size_t samples = 64;
  bool conditional = false;
  std::size_t ema = 8;

  // clustering
  int clusters = 2;
  Linkage linkage = Linkage::Average;
  double belief_split = 1.0;  // realdata-pipeline: mean label <= split forms the first belief

  // baselines
  std::vector<std::string> methods;  // baseline-compare subset of full, truncated, sigcon
  std::size_t sigcon_order = 2;
  std::size_t sigcon_corpus = 2000;

  CsvConfig csv;

  StreamTransformer transformer() const;
  void validate() const;
};

// Unknown keys anywhere are rejected with a config error naming the path.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
// Every field, defaults included.
nlohmann::json config_to_json(const ExperimentConfig& c);

nlohmann::json kernel_to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json model_to_json(const ModelPair& m);
ModelPair model_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace sigregime
