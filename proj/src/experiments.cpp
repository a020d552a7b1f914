#include "sigregime/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sigregime/baselines.hpp"
#include "sigregime/cluster.hpp"
#include "sigregime/detect.hpp"
#include "sigregime/error.hpp"
#include "sigregime/ingest.hpp"
#include "sigregime/parallel.hpp"
#include "sigregime/rng.hpp"
#include "sigregime/scoring.hpp"

namespace sigregime {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// seed streams
constexpr std::uint64_t kBeliefStream = 0x62656c6965667321ULL;
constexpr std::uint64_t kNullStream = 0x6e756c6cULL;
constexpr std::uint64_t kPathStream = 0x70617468ULL;
constexpr std::uint64_t kDetectStream = 0x64657465ULL;
constexpr std::uint64_t kCorpusStream = 0x636f7270ULL;
constexpr std::uint64_t kSigconStream = 0x73696763ULL;
constexpr std::uint64_t kScoreStream = 0x73636f72ULL;

template <typename F>
void for_runs(std::size_t n, F&& body) {
  if (n == 1) body(0);
  else parallel_for(n, body);
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}}; }

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

Summary summarize_field(const std::vector<ClassMetrics>& runs, std::optional<double> ClassMetrics::*f) {
  std::vector<std::optional<double>> v;
  for (const auto& r : runs) v.push_back(r.*f);
  return summarize(v);
}

struct RunPath {
  RegimePath regime;
  SubPathSet sp;
  std::vector<int> labels;  // per sub-path
};

RunPath simulate_run_path(const ExperimentConfig& c, std::size_t run) {
  RegimeSwitchSpec spec = c.path;
  spec.h1 = c.h1;
  spec.seed = derive_seed(c.seed, kPathStream, run);
  RunPath p;
  p.regime = simulate_regime_switching(spec);
  p.sp = extract_subpaths(p.regime.path, c.h1);
  p.labels = subpath_labels(p.regime.labels, c.h1);
  p.labels.resize(p.sp.size());
  return p;
}

std::vector<double> subpath_starts(const SubPathSet& sp) {
  std::vector<double> t;
  for (const auto& s : sp.paths) t.push_back(s.time(0));
  return t;
}

// Belief-based online detector.
struct Detector {
  std::string name;
  SignatureKernel kernel;
  Beliefs beliefs;
  std::vector<NullDistribution> nulls;
  double setup_seconds = 0.0;
};

Detector make_detector(const std::string& name, const KernelSpec& spec, const ExperimentConfig& c) {
  const auto t0 = Clock::now();
  Detector d{name, SignatureKernel(spec), {}, {}, 0.0};
  d.beliefs = simulate_beliefs(d.kernel, c.beliefs, c.h1, c.path.dt, c.bank_size, c.transformer(),
                               derive_seed(c.seed, kBeliefStream));
  d.nulls = belief_nulls(d.kernel, d.beliefs, c.h2, c.null.pairs, derive_seed(c.seed, kNullStream), c.alpha,
                         c.null.source, c.estimator);
  d.setup_seconds = seconds_since(t0);
  return d;
}

std::vector<std::optional<double>> to_optional(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

std::vector<std::optional<double>> flags_as_scores(const std::vector<bool>& f) {
  std::vector<std::optional<double>> out;
  for (bool b : f) out.push_back(b ? 1.0 : 0.0);
  return out;
}

void add_subpath_table(std::vector<Table>& tables, const std::string& name, const RunPath& p,
                       const std::vector<std::optional<double>>& score,
                       const std::vector<std::optional<double>>* extra = nullptr,
                       const std::string& extra_name = "") {
  Table t{name, {"subpath", "t_start", "label", "score"}, {}};
  if (extra) t.header.push_back(extra_name);
  const auto starts = subpath_starts(p.sp);
  for (std::size_t i = 0; i < p.sp.size(); ++i) {
    std::vector<std::optional<double>> row{double(i), starts[i], double(p.labels[i]), score[i]};
    if (extra) row.push_back((*extra)[i]);
    t.rows.push_back(std::move(row));
  }
  tables.push_back(std::move(t));
}

void add_ensemble_table(std::vector<Table>& tables, const std::string& name, const RunPath& p,
                        const DetectionReport& r, const Beliefs& b) {
  Table t{name, {"ensemble", "t_start"}, {}};
  for (std::size_t i = 0; i < b.size(); ++i) t.header.push_back("score_" + b.items[i].label);
  for (std::size_t i = 0; i < b.size(); ++i) t.header.push_back("critical_" + b.items[i].label);
  t.header.push_back("closest");
  t.header.push_back("anomalous");
  for (std::size_t e = 0; e < static_cast<std::size_t>(r.scores.cols()); ++e) {
    std::vector<std::optional<double>> row{double(e), p.sp.paths[e].time(0)};
    std::size_t closest = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      row.push_back(r.scores(i, e));
      if (r.quantiles(i, e) < r.quantiles(closest, e)) closest = i;
    }
    for (std::size_t i = 0; i < b.size(); ++i) row.push_back(r.critical[i]);
    row.push_back(double(closest));
    row.push_back(r.anomalous[e] ? 1.0 : 0.0);
    t.rows.push_back(std::move(row));
  }
  tables.push_back(std::move(t));
}

MethodResult sized(const std::string& name, std::size_t n, bool classifier = true) {
  MethodResult m;
  m.name = name;
  if (classifier) m.runs.resize(n);
  m.seconds.resize(n);
  return m;
}

// toy-detect, multiclass, rbergomi-detect, rank2-compare, baseline-compare
ExperimentResult run_belief_detection(const ExperimentConfig& c) {
  ExperimentResult res;
  res.config = c;
  std::vector<std::pair<std::string, KernelSpec>> kernels;
  bool with_sigcon = false;
  switch (c.kind) {
    case ExperimentKind::Rank2Compare:
      kernels = {{"rank1", c.kernel}, {"rank2", *c.compare_kernel}};
      break;
    case ExperimentKind::BaselineCompare: {
      auto methods = c.methods;
      if (methods.empty()) {
        methods = {"full"};
        if (c.compare_kernel) methods.push_back("truncated");
        methods.push_back("sigcon");
      }
      for (const auto& m : methods) {
        if (m == "full") kernels.emplace_back("full", c.kernel);
        else if (m == "truncated") kernels.emplace_back("truncated", *c.compare_kernel);
        else with_sigcon = true;
      }
      break;
    }
    default:
      kernels = {{"mmd", c.kernel}};
  }

  const std::size_t n = c.n_runs;
  std::vector<RunPath> paths(n);
  for_runs(n, [&](std::size_t r) { paths[r] = simulate_run_path(c, r); });
  const auto phi = c.transformer();

  json details = json::object();
  for (const auto& [name, spec] : kernels) {
    const Detector det = make_detector(name, spec, c);
    MethodResult m = sized(name, n);
    m.setup_seconds = det.setup_seconds;
    std::vector<DetectionReport> reports(n);
    for_runs(n, [&](std::size_t r) {
      const auto t0 = Clock::now();
      const auto prepared = prepare_subpaths(det.kernel, paths[r].sp, phi);
      reports[r] = detect_online(det.kernel, prepared, c.h2, det.beliefs, det.nulls, c.n_evals,
                                 derive_seed(c.seed, kDetectStream, r), c.estimator);
      m.seconds[r] = seconds_since(t0);
      m.runs[r] = classification_metrics(reports[r].exceedance, paths[r].labels);
    });
    std::vector<double> flag_rate(n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto& a = reports[r].anomalous;
      flag_rate[r] = a.empty() ? 0.0 : double(std::count(a.begin(), a.end(), true)) / a.size();
    }
    m.values["ensemble_flag_rate"] = flag_rate;
    json crit = json::object();
    for (std::size_t i = 0; i < det.beliefs.size(); ++i) crit[det.beliefs.items[i].label] = det.nulls[i].critical;
    details[name] = {{"critical", crit}};
    add_ensemble_table(res.tables, "ensembles_" + name, paths[0], reports[0], det.beliefs);
    add_subpath_table(res.tables, "subpaths_" + name, paths[0], reports[0].exceedance);
    res.methods.push_back(std::move(m));
  }

  if (with_sigcon) {
    const auto t0 = Clock::now();
    require(c.beliefs.front().channels() == c.path.models.front().channels(), ErrorKind::Config,
            "sigcon corpus model and path differ in channel count");
    const auto raw = simulate(c.beliefs.front(), Mesh{c.path.dt, c.h1, 0.0}, c.sigcon_corpus,
                              derive_seed(c.seed, kCorpusStream));
    std::vector<Stream> corpus;
    for (const auto& s : raw) corpus.push_back(phi(s));
    MethodResult m = sized("sigcon", n);
    m.setup_seconds = seconds_since(t0);
    std::vector<SigconResult> out(n);
    for_runs(n, [&](std::size_t r) {
      const auto t1 = Clock::now();
      std::vector<Stream> obs;
      for (const auto& s : paths[r].sp.paths) obs.push_back(phi(s));
      out[r] = sigcon_detect(obs, corpus, c.sigcon_order, c.alpha, derive_seed(c.seed, kSigconStream));
      m.seconds[r] = seconds_since(t1);
      const auto conf = to_optional(out[r].scores);
      m.runs[r] = classification_metrics(flags_as_scores(out[r].flags), paths[r].labels, 0.5, &conf);
    });
    details["sigcon"] = {{"threshold", out[0].threshold},
                         {"pseudo_inverse", out[0].model.pseudo_inverse},
                         {"rank", out[0].model.rank}};
    const auto conf0 = to_optional(out[0].scores);
    add_subpath_table(res.tables, "subpaths_sigcon", paths[0], flags_as_scores(out[0].flags), &conf0,
                      "conformance");
    res.methods.push_back(std::move(m));
  }

  std::vector<double> change_share(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& l = paths[r].labels;
    change_share[r] = l.empty() ? 0.0 : double(std::count(l.begin(), l.end(), 1)) / l.size();
  }
  details["change_share"] = summary_json(summarize(change_share));
  res.details = details;
  return res;
}

// single-path and nonmarkov: path-wise similarity scores
ExperimentResult run_pathwise(const ExperimentConfig& c) {
  ExperimentResult res;
  res.config = c;
  const std::size_t n = c.n_runs;
  const auto t0 = Clock::now();
  const SignatureKernel k(c.kernel);
  const auto phi = c.transformer();
  Beliefs beliefs = c.conditional ? Beliefs{} : simulate_beliefs(k, c.beliefs, c.h1, c.path.dt, c.bank_size, phi,
                                                                 derive_seed(c.seed, kBeliefStream));
  if (c.conditional) {
    // models only; samples are simulated per window
    for (std::size_t i = 0; i < c.beliefs.size(); ++i)
      beliefs.items.push_back({"belief" + std::to_string(i), c.beliefs[i], {}});
    beliefs.h1 = c.h1;
    beliefs.dt = c.path.dt;
    beliefs.phi = phi;
  }
  MethodResult m = sized(c.conditional ? "conditional" : "pathwise", n);
  m.setup_seconds = seconds_since(t0);

  std::vector<RunPath> paths(n);
  std::vector<std::vector<std::optional<double>>> sigma(n);
  std::vector<double> first(n), second(n);
  for_runs(n, [&](std::size_t r) {
    const auto t1 = Clock::now();
    paths[r] = simulate_run_path(c, r);
    PathwiseOptions opt{c.samples, c.conditional, derive_seed(c.seed, kScoreStream, r)};
    const auto rep = pathwise_detect(k, paths[r].sp.paths, beliefs, opt);
    const std::size_t ns = rep.similarity.matrices.size();
    sigma[r].resize(ns);
    for (std::size_t j = 0; j < ns; ++j) sigma[r][j] = rep.similarity.matrices[j](0, 0);
    first[r] = rep.similarity.mean_entry(0, 0, 0, ns / 2);
    second[r] = rep.similarity.mean_entry(0, 0, ns / 2, ns);
    m.seconds[r] = seconds_since(t1);
    m.runs[r] = classification_metrics(flags_as_scores(rep.flags), paths[r].labels, 0.5, &sigma[r]);
  });
  m.values["first_half_mean"] = first;
  m.values["second_half_mean"] = second;
  std::size_t rising = 0;
  for (std::size_t r = 0; r < n; ++r) rising += second[r] > first[r];
  res.details = {{"runs_second_half_higher", rising}, {"samples", c.samples}, {"conditional", c.conditional}};
  const auto smooth = ema(sigma[0], c.ema);
  add_subpath_table(res.tables, "subpaths_" + m.name, paths[0], sigma[0], &smooth, "ema");
  res.methods.push_back(std::move(m));
  return res;
}

ExperimentResult run_cluster(const ExperimentConfig& c) {
  ExperimentResult res;
  res.config = c;
  const std::size_t n = c.n_runs;
  const SignatureKernel k(c.kernel);
  const auto phi = c.transformer();
  MethodResult m = sized("cluster", n, false);
  std::vector<double> acc(n);
  std::vector<RunPath> paths(n);
  std::vector<ClusterAssignment> assign(n);
  std::vector<std::vector<std::optional<double>>> avg(n);
  for_runs(n, [&](std::size_t r) {
    const auto t0 = Clock::now();
    paths[r] = simulate_run_path(c, r);
    const auto prepared = prepare_subpaths(k, paths[r].sp, phi);
    const auto d = distance_matrix(k, prepared, c.h2);
    assign[r] = agglomerate(d, c.clusters, c.linkage);
    avg[r] = assign_subpath_labels(assign[r].labels, prepared.size(), c.h2);
    acc[r] = permutation_accuracy(avg[r], paths[r].labels, std::max(c.clusters, 2));
    m.seconds[r] = seconds_since(t0);
  });
  m.values["accuracy"] = acc;
  add_subpath_table(res.tables, "subpaths_cluster", paths[0], avg[0]);
  Table merges{"merges", {"step", "a", "b", "height", "size"}, {}};
  for (std::size_t s = 0; s < assign[0].merges.size(); ++s) {
    const auto& g = assign[0].merges[s];
    merges.rows.push_back({double(s), double(g.a), double(g.b), g.height, double(g.size)});
  }
  res.tables.push_back(std::move(merges));
  res.details = {{"linkage", linkage_name(c.linkage)}, {"clusters", c.clusters}};
  res.methods.push_back(std::move(m));
  return res;
}

IngestResult load_csv(const ExperimentConfig& c) {
  return ingest_csv(c.csv.path, CsvSchema{c.csv.time_column, c.csv.columns, c.csv.max_bad_fraction});
}

json ingest_json(const IngestResult& in) {
  return {{"rows", in.stream.size()},
          {"total_rows", in.total_rows},
          {"missing_rows", in.missing_rows},
          {"bad_rows", in.bad_rows},
          {"columns", in.columns},
          {"first", in.stamps.front()},
          {"last", in.stamps.back()}};
}

ExperimentResult run_realdata_auto(const ExperimentConfig& c) {
  ExperimentResult res;
  res.config = c;
  const auto t0 = Clock::now();
  const auto in = load_csv(c);
  const SignatureKernel k(c.kernel);
  const auto sp = extract_subpaths(in.stream, c.h1);
  const auto prepared = prepare_subpaths(k, sp, c.transformer());
  const auto scores = auto_evaluate(k, prepared, c.h2, c.lags, c.weights, c.estimator);
  const auto roll = rolling_threshold(scores, c.window, c.alpha);

  MethodResult m = sized("auto", 1, false);
  std::size_t flagged = 0, judged = 0;
  for (const auto& f : roll.flags)
    if (f) {
      ++judged;
      flagged += *f;
    }
  m.values["flag_rate"] = {judged ? double(flagged) / judged : 0.0};
  m.values["flags"] = {double(flagged)};
  m.seconds[0] = seconds_since(t0);

  // one row per ensemble: sub-paths i .. i + h2 - 1
  Table t{"auto_series", {"ensemble", "t_start", "t_end", "score", "threshold", "flag", "shape", "scale", "empirical"},
          {}};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& last = sp.paths[i + c.h2 - 1];
    std::optional<double> flag;
    if (roll.flags[i]) flag = *roll.flags[i] ? 1.0 : 0.0;
    std::optional<double> shape, scale;
    if (!std::isnan(roll.shape[i])) shape = roll.shape[i];
    if (!std::isnan(roll.scale[i])) scale = roll.scale[i];
    t.rows.push_back({double(i), sp.paths[i].time(0), last.time(last.size() - 1), scores[i], roll.threshold[i], flag,
                      shape, scale,
                      roll.threshold[i] ? std::optional<double>(roll.empirical[i] ? 1.0 : 0.0) : std::nullopt});
  }
  res.tables.push_back(std::move(t));
  res.details = {{"ingest", ingest_json(in)},
                 {"subpaths", sp.size()},
                 {"ensembles", scores.size()},
                 {"judged", judged},
                 {"flagged", flagged},
                 {"burn_in", roll.burn_in}};
  res.methods.push_back(std::move(m));
  return res;
}

// Squared log returns summed over rows and channels (squared increments when
// a value is not positive).
double realised_variance(const Stream& s) {
  double v = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i)
    for (std::size_t ch = 0; ch < s.dim(); ++ch) {
      const double a = s.at(i - 1, ch), b = s.at(i, ch);
      const double x = (a > 0.0 && b > 0.0) ? std::log(b / a) : b - a;
      v += x * x;
    }
  return v;
}

ExperimentResult run_realdata_pipeline(const ExperimentConfig& c) {
  ExperimentResult res;
  res.config = c;
  const auto t0 = Clock::now();
  const auto in = load_csv(c);
  const SignatureKernel k(c.kernel);
  const auto phi = c.transformer();
  const auto sp = extract_subpaths(in.stream, c.h1);
  const auto prepared = prepare_subpaths(k, sp, phi);
  const auto d = distance_matrix(k, prepared, c.h2);
  auto assign = agglomerate(d, c.clusters, c.linkage);

  // renumber clusters by calmness: label 0 has the lowest mean realised variance
  std::vector<double> rv(sp.size());
  for (std::size_t i = 0; i < sp.size(); ++i) rv[i] = realised_variance(sp.paths[i]);
  std::vector<double> sum(c.clusters, 0.0), cnt(c.clusters, 0.0);
  for (std::size_t e = 0; e < assign.labels.size(); ++e)
    for (std::size_t i = e; i < e + c.h2; ++i) {
      sum[assign.labels[e]] += rv[i];
      cnt[assign.labels[e]] += 1.0;
    }
  std::vector<int> order(c.clusters);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return sum[a] / std::max(cnt[a], 1.0) < sum[b] / std::max(cnt[b], 1.0);
  });
  std::vector<int> rank(c.clusters);
  for (int i = 0; i < c.clusters; ++i) rank[order[i]] = i;
  for (auto& l : assign.labels) l = rank[l];
  const auto avg = assign_subpath_labels(assign.labels, sp.size(), c.h2);

  std::vector<Stream> calm, turbulent;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    if (!avg[i]) continue;
    (*avg[i] <= c.belief_split ? calm : turbulent).push_back(sp.paths[i]);
  }
  require(calm.size() >= 2 && turbulent.size() >= 2, ErrorKind::Degenerate,
          "cluster split leaves fewer than 2 sub-paths in a belief (" + std::to_string(calm.size()) + ", " +
              std::to_string(turbulent.size()) + ")");
  Beliefs beliefs;
  beliefs.h1 = c.h1;
  beliefs.phi = phi;
  beliefs.items.push_back(empirical_belief(k, "calm", calm, phi));
  beliefs.items.push_back(empirical_belief(k, "turbulent", turbulent, phi));

  // small clusters cap the number of paths drawn per belief
  const std::size_t samples = std::min({c.samples, calm.size(), turbulent.size()});
  const auto rep = pathwise_detect(k, sp.paths, beliefs, {samples, false, derive_seed(c.seed, kScoreStream)});
  std::vector<std::optional<double>> sigma(sp.size());
  for (std::size_t j = 0; j < sp.size(); ++j) sigma[j] = rep.similarity.matrices[j](0, 0);
  const auto smooth = ema(sigma, c.ema);
  std::size_t flagged = 0;
  Table t{"pipeline_series", {"subpath", "t_start", "avg_label", "score", "ema", "flag"}, {}};
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const bool f = smooth[i] && *smooth[i] >= 0.0;
    flagged += f;
    t.rows.push_back({double(i), sp.paths[i].time(0), avg[i], sigma[i], smooth[i], f ? 1.0 : 0.0});
  }
  res.tables.push_back(std::move(t));

  MethodResult m = sized("pipeline", 1, false);
  m.values["turbulent_share"] = {sp.size() ? double(flagged) / sp.size() : 0.0};
  m.seconds[0] = seconds_since(t0);
  res.details = {{"ingest", ingest_json(in)},
                 {"subpaths", sp.size()},
                 {"calm_paths", calm.size()},
                 {"turbulent_paths", turbulent.size()},
                 {"samples_used", samples},
                 {"flagged", flagged}};
  res.methods.push_back(std::move(m));
  return res;
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream o;
  o.precision(prec);
  o << std::fixed << x;
  return o.str();
}

std::string pm(const Summary& s) { return fmt(s.mean) + " +- " + fmt(s.std) + " (n=" + std::to_string(s.n) + ")"; }

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  require(out.good(), ErrorKind::Config, "cannot write '" + p.string() + "'");
  out << text;
}

}  // namespace

Summary MethodResult::total() const { return summarize_field(runs, &ClassMetrics::total); }
Summary MethodResult::on() const { return summarize_field(runs, &ClassMetrics::on); }
Summary MethodResult::off() const { return summarize_field(runs, &ClassMetrics::off); }
Summary MethodResult::auc() const { return summarize_field(runs, &ClassMetrics::auc); }

const MethodResult& ExperimentResult::method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return m;
  fail(ErrorKind::Argument, "no method '" + name + "' in result");
}

json ExperimentResult::metrics_json() const {
  json out = json::object();
  for (const auto& m : methods) {
    json j = json::object();
    if (!m.runs.empty()) {
      j["regime_on"] = summary_json(m.on());
      j["regime_off"] = summary_json(m.off());
      j["total"] = summary_json(m.total());
      j["auc"] = summary_json(m.auc());
      json runs = json::array();
      for (const auto& r : m.runs)
        runs.push_back({{"regime_on", opt_json(r.on)},
                        {"regime_off", opt_json(r.off)},
                        {"total", opt_json(r.total)},
                        {"auc", opt_json(r.auc)},
                        {"n_on", r.n_on},
                        {"n_off", r.n_off}});
      j["runs"] = runs;
    }
    for (const auto& [key, v] : m.values) j[key] = {{"summary", summary_json(summarize(v))}, {"runs", v}};
    out[m.name] = j;
  }
  return out;
}

json ExperimentResult::report_json() const {
  return {{"experiment", kind_name(config.kind)},
          {"seed", config.seed},
          {"config", config_to_json(config)},
          {"metrics", metrics_json()},
          {"details", details},
          {"series", [&] {
             json s = json::array();
             for (const auto& t : tables) s.push_back(t.name + ".csv");
             return s;
           }()}};
}

json ExperimentResult::timing_json() const {
  json out = json::object();
  for (const auto& m : methods)
    out[m.name] = {{"setup_seconds", m.setup_seconds},
                   {"per_run", summary_json(m.seconds_summary())},
                   {"runs", m.seconds}};
  return out;
}

std::string ExperimentResult::report_text() const {
  std::ostringstream o;
  o << "experiment: " << kind_name(config.kind) << "\n";
  o << "seed: " << config.seed << "\n";
  o << "runs: " << config.n_runs << "\n";
  o << "h: (" << config.h1 << ", " << config.h2 << ")\n";
  for (const auto& m : methods) {
    o << "\n[" << m.name << "]\n";
    if (!m.runs.empty()) {
      o << "  regime-on accuracy:  " << pm(m.on()) << "\n";
      o << "  regime-off accuracy: " << pm(m.off()) << "\n";
      o << "  total accuracy:      " << pm(m.total()) << "\n";
      o << "  ROC AUC:             " << pm(m.auc()) << "\n";
    }
    for (const auto& [key, v] : m.values) o << "  " << key << ": " << pm(summarize(v)) << "\n";
  }
  o << "\ndetails: " << details.dump() << "\n";
  return o.str();
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  c.validate();
  const int saved = num_threads();
  if (c.threads > 0) set_num_threads(c.threads);
  struct Restore {
    int n;
    ~Restore() { set_num_threads(n); }
  } restore{saved};
  switch (c.kind) {
    case ExperimentKind::ToyDetect:
    case ExperimentKind::Multiclass:
    case ExperimentKind::RBergomiDetect:
    case ExperimentKind::Rank2Compare:
    case ExperimentKind::BaselineCompare:
      return run_belief_detection(c);
    case ExperimentKind::SinglePath:
    case ExperimentKind::NonMarkov:
      return run_pathwise(c);
    case ExperimentKind::Cluster:
      return run_cluster(c);
    case ExperimentKind::RealdataAuto:
      return run_realdata_auto(c);
    case ExperimentKind::RealdataPipeline:
      return run_realdata_pipeline(c);
  }
  fail(ErrorKind::Config, "unhandled experiment kind");
}

ExperimentResult run_bootstrap_null(const ExperimentConfig& c) {
  require(!c.beliefs.empty(), ErrorKind::Config, "bootstrap-null needs beliefs");
  const int saved = num_threads();
  if (c.threads > 0) set_num_threads(c.threads);
  struct Restore {
    int n;
    ~Restore() { set_num_threads(n); }
  } restore{saved};
  ExperimentResult res;
  res.config = c;
  const Detector det = make_detector("null", c.kernel, c);
  MethodResult m = sized("null", 0, false);
  m.setup_seconds = det.setup_seconds;
  Table t{"null_samples", {"draw"}, {}};
  json crit = json::object();
  std::size_t rows = 0;
  for (std::size_t i = 0; i < det.beliefs.size(); ++i) {
    const auto& label = det.beliefs.items[i].label;
    t.header.push_back(label);
    crit[label] = {{"critical", det.nulls[i].critical},
                   {"source", null_source_name(det.nulls[i].source)},
                   {"shape", det.nulls[i].shape},
                   {"scale", det.nulls[i].scale}};
    rows = std::max(rows, det.nulls[i].samples.size());
  }
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::optional<double>> row{double(r)};
    for (const auto& nd : det.nulls)
      row.push_back(r < nd.samples.size() ? std::optional<double>(nd.samples[r]) : std::nullopt);
    t.rows.push_back(std::move(row));
  }
  res.tables.push_back(std::move(t));
  res.details = {{"nulls", crit}, {"pairs", c.null.pairs}, {"h2", c.h2}, {"bank_size", c.bank_size}};
  res.methods.push_back(std::move(m));
  return res;
}

void write_artifacts(const ExperimentResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::Config, "cannot create output directory '" + dir + "': " + ec.message());
  const fs::path d(dir);
  write_file(d / "report.txt", r.report_text());
  write_file(d / "report.json", r.report_json().dump(2) + "\n");
  write_file(d / "metrics.json", r.metrics_json().dump(2) + "\n");
  write_file(d / "config.resolved.json", config_to_json(r.config).dump(2) + "\n");
  write_file(d / "timing.json", r.timing_json().dump(2) + "\n");
  for (const auto& t : r.tables) {
    std::ostringstream o;
    o.precision(17);
    for (std::size_t i = 0; i < t.header.size(); ++i) o << (i ? "," : "") << t.header[i];
    o << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) o << ",";
        if (row[i]) o << *row[i];
      }
      o << "\n";
    }
    write_file(d / (t.name + ".csv"), o.str());
  }
}

}  // namespace sigregime
