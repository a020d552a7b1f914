#include "sigregime/config.hpp"

#include <fstream>
#include <set>

#include "sigregime/error.hpp"

namespace sigregime {

using nlohmann::json;

namespace {

struct KindEntry {
  ExperimentKind kind;
  const char* name;
};

constexpr KindEntry kKinds[] = {
    {ExperimentKind::ToyDetect, "toy-detect"},
    {ExperimentKind::Multiclass, "multiclass"},
    {ExperimentKind::SinglePath, "single-path"},
    {ExperimentKind::RBergomiDetect, "rbergomi-detect"},
    {ExperimentKind::Rank2Compare, "rank2-compare"},
    {ExperimentKind::BaselineCompare, "baseline-compare"},
    {ExperimentKind::NonMarkov, "nonmarkov"},
    {ExperimentKind::Cluster, "cluster"},
    {ExperimentKind::RealdataAuto, "realdata-auto"},
    {ExperimentKind::RealdataPipeline, "realdata-pipeline"},
};

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require(j.is_object(), ErrorKind::Config, where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    require(ok.count(key) > 0, ErrorKind::Config, "unknown key '" + key + "' in " + where);
}

// Reads j[key] into out when present; type errors become config errors.
template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, where + "." + key + ": " + e.what());
  }
}

std::string estimator_name(Estimator e) { return e == Estimator::Biased ? "biased" : "unbiased"; }

Estimator parse_estimator(const std::string& s) {
  if (s == "biased") return Estimator::Biased;
  if (s == "unbiased") return Estimator::Unbiased;
  fail(ErrorKind::Config, "unknown estimator '" + s + "'");
}

NullSource parse_null_source(const std::string& s) {
  if (s == "bootstrap") return NullSource::Bootstrap;
  if (s == "gamma") return NullSource::Gamma;
  fail(ErrorKind::Config, "null source must be bootstrap or gamma, got '" + s + "'");
}

std::string mode_name(SwitchMode m) { return m == SwitchMode::Poisson ? "poisson" : "fixed"; }

SwitchMode parse_mode(const std::string& s) {
  if (s == "poisson") return SwitchMode::Poisson;
  if (s == "fixed") return SwitchMode::FixedDuration;
  fail(ErrorKind::Config, "switch mode must be poisson or fixed, got '" + s + "'");
}

}  // namespace

std::string kind_name(ExperimentKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "?";
}

ExperimentKind parse_kind(const std::string& s) {
  for (const auto& e : kKinds)
    if (s == e.name) return e.kind;
  fail(ErrorKind::Config, "unknown experiment '" + s + "'");
}

json kernel_to_json(const KernelSpec& k) {
  return {{"rank", k.rank},
          {"lift", lift_name(k.lift)},
          {"sigma1", k.sigma1},
          {"sigma2", k.sigma2},
          {"dyadic_order", k.dyadic_order},
          {"inner_order", k.inner_order},
          {"truncated", k.truncated},
          {"truncation", k.truncation},
          {"include_time", k.include_time},
          {"capacity", k.capacity}};
}

KernelSpec kernel_from_json(const json& j, const std::string& where) {
  check_keys(j, where,
             {"rank", "lift", "sigma1", "sigma2", "dyadic_order", "inner_order", "truncated", "truncation",
              "include_time", "capacity"});
  KernelSpec k;
  read(j, "rank", k.rank, where);
  std::string lift = lift_name(k.lift);
  read(j, "lift", lift, where);
  try {
    k.lift = parse_lift(lift);
  } catch (const Error& e) {
    fail(ErrorKind::Config, where + ".lift: " + e.what());
  }
  read(j, "sigma1", k.sigma1, where);
  read(j, "sigma2", k.sigma2, where);
  read(j, "dyadic_order", k.dyadic_order, where);
  read(j, "inner_order", k.inner_order, where);
  read(j, "truncated", k.truncated, where);
  read(j, "truncation", k.truncation, where);
  read(j, "include_time", k.include_time, where);
  read(j, "capacity", k.capacity, where);
  return k;
}

json model_to_json(const ModelPair& m) {
  return {{"family", family_name(m.family)}, {"theta", m.theta}, {"dim", m.dim}, {"emit_vol", m.emit_vol}};
}

ModelPair model_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"family", "theta", "dim", "emit_vol"});
  ModelPair m;
  std::string fam = family_name(m.family);
  read(j, "family", fam, where);
  try {
    m.family = parse_family(fam);
  } catch (const Error& e) {
    fail(ErrorKind::Config, where + ".family: " + e.what());
  }
  read(j, "theta", m.theta, where);
  read(j, "dim", m.dim, where);
  read(j, "emit_vol", m.emit_vol, where);
  try {
    m.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, where + ": " + e.what());
  }
  return m;
}

StreamTransformer ExperimentConfig::transformer() const {
  std::vector<Transform> ts;
  for (const auto& name : transforms) ts.push_back(parse_transform(name, name == "scale" ? scale : std::vector<double>{}));
  return compose(std::move(ts));
}

void ExperimentConfig::validate() const {
  auto cfg = [](bool ok, const std::string& msg) { require(ok, ErrorKind::Config, msg); };
  cfg(n_runs >= 1, "n_runs must be >= 1");
  cfg(h1 >= 2, "h1 must be >= 2");
  cfg(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  cfg(threads >= 0, "threads must be >= 0");
  try {
    kernel.validate();
    if (compare_kernel) compare_kernel->validate();
    transformer();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  const bool simulated = kind != ExperimentKind::RealdataAuto && kind != ExperimentKind::RealdataPipeline;
  if (simulated) cfg(!path.models.empty(), "path.models is empty");
  switch (kind) {
    case ExperimentKind::ToyDetect:
    case ExperimentKind::Multiclass:
    case ExperimentKind::RBergomiDetect:
      cfg(!beliefs.empty(), "beliefs are required");
      cfg(h2 >= 2 || estimator == Estimator::Biased, "unbiased MMD needs h2 >= 2");
      cfg(bank_size >= 2 * h2, "bank_size must hold two ensembles");
      break;
    case ExperimentKind::Rank2Compare:
      cfg(!beliefs.empty(), "beliefs are required");
      cfg(compare_kernel.has_value(), "rank2-compare needs compare_kernel");
      cfg(bank_size >= 2 * h2, "bank_size must hold two ensembles");
      break;
    case ExperimentKind::BaselineCompare:
      cfg(!beliefs.empty(), "beliefs are required");
      for (const auto& m : methods)
        cfg(m == "full" || m == "truncated" || m == "sigcon", "unknown method '" + m + "'");
      for (const auto& m : methods)
        if (m == "truncated") cfg(compare_kernel.has_value(), "method 'truncated' needs compare_kernel");
      cfg(bank_size >= 2 * h2, "bank_size must hold two ensembles");
      cfg(sigcon_corpus >= 4, "sigcon_corpus must be >= 4");
      break;
    case ExperimentKind::SinglePath:
    case ExperimentKind::NonMarkov:
      cfg(beliefs.size() >= 2, "path-wise scoring needs at least 2 beliefs");
      cfg(samples >= 2, "samples must be >= 2");
      cfg(kernel.rank == 1, "scoring rules need a rank-1 kernel");
      break;
    case ExperimentKind::Cluster:
      cfg(clusters >= 1, "clusters must be >= 1");
      break;
    case ExperimentKind::RealdataAuto:
      cfg(!csv.path.empty(), "csv.path is required");
      cfg(window >= 2, "window must be set (>= 2); no single default is endorsed");
      cfg(!lags.empty(), "lags must not be empty");
      cfg(weights.empty() || weights.size() == lags.size(), "one weight per lag");
      break;
    case ExperimentKind::RealdataPipeline:
      cfg(!csv.path.empty(), "csv.path is required");
      cfg(clusters >= 2, "realdata-pipeline needs at least 2 clusters");
      cfg(samples >= 2, "samples must be >= 2");
      cfg(kernel.rank == 1, "scoring rules need a rank-1 kernel");
      break;
  }
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"experiment", "seed", "n_runs", "threads", "out_dir", "h1", "h2", "transforms", "scale", "kernel",
              "compare_kernel", "alpha", "estimator", "null", "n_evals", "bank_size", "path", "beliefs", "lags",
              "weights", "window", "samples", "conditional", "ema", "clusters", "linkage", "belief_split",
              "methods", "sigcon_order", "sigcon_corpus", "csv"});
  require(j.contains("experiment"), ErrorKind::Config, "config.experiment is required");
  ExperimentConfig c;
  const std::string w = "config";
  std::string kind;
  read(j, "experiment", kind, w);
  c.kind = parse_kind(kind);
  read(j, "seed", c.seed, w);
  read(j, "n_runs", c.n_runs, w);
  read(j, "threads", c.threads, w);
  read(j, "out_dir", c.out_dir, w);
  read(j, "h1", c.h1, w);
  read(j, "h2", c.h2, w);
  read(j, "transforms", c.transforms, w);
  read(j, "scale", c.scale, w);
  if (j.contains("kernel")) c.kernel = kernel_from_json(j["kernel"], "config.kernel");
  if (j.contains("compare_kernel") && !j["compare_kernel"].is_null())
    c.compare_kernel = kernel_from_json(j["compare_kernel"], "config.compare_kernel");
  read(j, "alpha", c.alpha, w);
  std::string est = estimator_name(c.estimator);
  read(j, "estimator", est, w);
  c.estimator = parse_estimator(est);
  if (j.contains("null")) {
    const auto& n = j["null"];
    check_keys(n, "config.null", {"source", "pairs"});
    std::string src = null_source_name(c.null.source);
    read(n, "source", src, "config.null");
    c.null.source = parse_null_source(src);
    read(n, "pairs", c.null.pairs, "config.null");
  }
  read(j, "n_evals", c.n_evals, w);
  read(j, "bank_size", c.bank_size, w);
  if (j.contains("path")) {
    const auto& p = j["path"];
    const std::string pw = "config.path";
    check_keys(p, pw,
               {"models", "lambda1", "lambda2", "mode", "duration", "n_changes", "entries", "horizon", "dt", "x0",
                "lattice_aligned"});
    if (p.contains("models")) {
      require(p["models"].is_array(), ErrorKind::Config, "config.path.models must be a list");
      for (std::size_t i = 0; i < p["models"].size(); ++i)
        c.path.models.push_back(model_from_json(p["models"][i], pw + ".models[" + std::to_string(i) + "]"));
    }
    read(p, "lambda1", c.path.lambda1, pw);
    read(p, "lambda2", c.path.lambda2, pw);
    std::string mode = mode_name(c.path.mode);
    read(p, "mode", mode, pw);
    c.path.mode = parse_mode(mode);
    read(p, "duration", c.path.duration, pw);
    read(p, "n_changes", c.path.n_changes, pw);
    read(p, "entries", c.path.entries, pw);
    read(p, "horizon", c.path.horizon, pw);
    read(p, "dt", c.path.dt, pw);
    read(p, "x0", c.path.x0, pw);
    read(p, "lattice_aligned", c.path.lattice_aligned, pw);
  }
  if (j.contains("beliefs")) {
    require(j["beliefs"].is_array(), ErrorKind::Config, "config.beliefs must be a list");
    for (std::size_t i = 0; i < j["beliefs"].size(); ++i)
      c.beliefs.push_back(model_from_json(j["beliefs"][i], "config.beliefs[" + std::to_string(i) + "]"));
  }
  read(j, "lags", c.lags, w);
  read(j, "weights", c.weights, w);
  read(j, "window", c.window, w);
  read(j, "samples", c.samples, w);
  read(j, "conditional", c.conditional, w);
  read(j, "ema", c.ema, w);
  read(j, "clusters", c.clusters, w);
  std::string link = linkage_name(c.linkage);
  read(j, "linkage", link, w);
  try {
    c.linkage = parse_linkage(link);
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  read(j, "belief_split", c.belief_split, w);
  read(j, "methods", c.methods, w);
  read(j, "sigcon_order", c.sigcon_order, w);
  read(j, "sigcon_corpus", c.sigcon_corpus, w);
  if (j.contains("csv")) {
    const auto& s = j["csv"];
    check_keys(s, "config.csv", {"path", "time_column", "columns", "max_bad_fraction"});
    read(s, "path", c.csv.path, "config.csv");
    read(s, "time_column", c.csv.time_column, "config.csv");
    read(s, "columns", c.csv.columns, "config.csv");
    read(s, "max_bad_fraction", c.csv.max_bad_fraction, "config.csv");
  }
  c.path.h1 = c.h1;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Config, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json models = json::array(), beliefs = json::array();
  for (const auto& m : c.path.models) models.push_back(model_to_json(m));
  for (const auto& m : c.beliefs) beliefs.push_back(model_to_json(m));
  return {
      {"experiment", kind_name(c.kind)},
      {"seed", c.seed},
      {"n_runs", c.n_runs},
      {"threads", c.threads},
      {"out_dir", c.out_dir},
      {"h1", c.h1},
      {"h2", c.h2},
      {"transforms", c.transforms},
      {"scale", c.scale},
      {"kernel", kernel_to_json(c.kernel)},
      {"compare_kernel", c.compare_kernel ? kernel_to_json(*c.compare_kernel) : json(nullptr)},
      {"alpha", c.alpha},
      {"estimator", estimator_name(c.estimator)},
      {"null", {{"source", null_source_name(c.null.source)}, {"pairs", c.null.pairs}}},
      {"n_evals", c.n_evals},
      {"bank_size", c.bank_size},
      {"path",
       {{"models", models},
        {"lambda1", c.path.lambda1},
        {"lambda2", c.path.lambda2},
        {"mode", mode_name(c.path.mode)},
        {"duration", c.path.duration},
        {"n_changes", c.path.n_changes},
        {"entries", c.path.entries},
        {"horizon", c.path.horizon},
        {"dt", c.path.dt},
        {"x0", c.path.x0},
        {"lattice_aligned", c.path.lattice_aligned}}},
      {"beliefs", beliefs},
      {"lags", c.lags},
      {"weights", c.weights},
      {"window", c.window},
      {"samples", c.samples},
      {"conditional", c.conditional},
      {"ema", c.ema},
      {"clusters", c.clusters},
      {"linkage", linkage_name(c.linkage)},
      {"belief_split", c.belief_split},
      {"methods", c.methods},
      {"sigcon_order", c.sigcon_order},
      {"sigcon_corpus", c.sigcon_corpus},
      {"csv",
       {{"path", c.csv.path},
        {"time_column", c.csv.time_column},
        {"columns", c.csv.columns},
        {"max_bad_fraction", c.csv.max_bad_fraction}}},
  };
}

}  // namespace sigregime
