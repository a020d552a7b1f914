// Acceptance suite: one PASS/FAIL line per criterion. Exits 0 unless a
// criterion throws; --strict also fails on FAIL lines. --only=N runs one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "sigregime/config.hpp"
#include "sigregime/detect.hpp"
#include "sigregime/error.hpp"
#include "sigregime/experiments.hpp"
#include "sigregime/mmd.hpp"
#include "sigregime/models.hpp"
#include "sigregime/rng.hpp"
#include "sigregime/scoring.hpp"
#include "sigregime/sigkernel.hpp"
#include "sigregime/signature.hpp"

using namespace sigregime;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string f(double x, int p = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", p, x);
  return buf;
}

std::string g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

ExperimentConfig shipped(const std::string& name) {
  return load_config(std::string(SOURCE_DIR) + "/configs/" + name + ".json");
}

KernelSpec linear_plain(int lambda) {
  KernelSpec s;
  s.include_time = false;
  s.dyadic_order = lambda;
  return s;
}

Stream line(double a) { return Stream({0.0, 1.0}, {0.0, a}, 1); }

Stream walk(std::mt19937_64& gen, std::size_t n, std::size_t d, double step) {
  std::normal_distribution<double> z;
  std::vector<double> t(n), v(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = double(i) / double(n - 1);
    if (i)
      for (std::size_t c = 0; c < d; ++c) v[i * d + c] = v[(i - 1) * d + c] + step * z(gen);
  }
  return Stream(t, v, d);
}

// ---------------------------------------------------------------- 1
Outcome kernel_correctness() {
  const auto t0 = Clock::now();
  const double k = solve_goursat(line(1.0), line(1.0), linear_plain(5));
  const double secs = since(t0);
  double series = 0.0, term = 1.0;
  for (int i = 0; i < 40; ++i) {
    series += term;
    term /= (i + 1.0) * (i + 1.0);
  }
  const double rel = std::abs(k - series) / series;
  return {rel < 1e-3 && secs < 1.0,
          "k=" + f(k, 7) + " series=" + f(series, 7) + " rel.err=" + g(rel) + " (<1e-3) time=" + g(secs) + "s"};
}

// ---------------------------------------------------------------- 2
Outcome pde_convergence() {
  std::mt19937_64 gen(4);
  double lo = 1e9, hi = 0.0;
  for (int pair = 0; pair < 3; ++pair) {
    const auto x = walk(gen, 5, 2, 0.6), y = walk(gen, 6, 2, 0.6);
    const double ref = solve_goursat(x, y, linear_plain(8));
    double prev = std::abs(solve_goursat(x, y, linear_plain(3)) - ref);
    for (int l = 4; l <= 6; ++l) {
      const double err = std::abs(solve_goursat(x, y, linear_plain(l)) - ref);
      lo = std::min(lo, prev / err);
      hi = std::max(hi, prev / err);
      prev = err;
    }
  }
  return {lo >= 2.5 && hi <= 6.0, "error ratios per refinement in [" + f(lo, 2) + ", " + f(hi, 2) + "] (need [2.5, 6])"};
}

// ---------------------------------------------------------------- 3
Stream concat(const Stream& a, const Stream& b) {
  // b shifted to start where a ends
  std::vector<double> t = a.times(), v = a.values();
  const std::size_t d = a.dim();
  for (std::size_t i = 1; i < b.size(); ++i) {
    t.push_back(a.time(a.size() - 1) + b.time(i) - b.time(0));
    for (std::size_t c = 0; c < d; ++c) v.push_back(a.at(a.size() - 1, c) + b.at(i, c) - b.at(0, c));
  }
  return Stream(t, v, d);
}

Stream midpoints(const Stream& s) {
  std::vector<double> t, v;
  for (std::size_t i = 0; i < s.size(); ++i) {
    t.push_back(s.time(i));
    for (std::size_t c = 0; c < s.dim(); ++c) v.push_back(s.at(i, c));
    if (i + 1 < s.size()) {
      t.push_back(0.5 * (s.time(i) + s.time(i + 1)));
      for (std::size_t c = 0; c < s.dim(); ++c) v.push_back(0.5 * (s.at(i, c) + s.at(i + 1, c)));
    }
  }
  return Stream(t, v, s.dim());
}

Outcome signature_algebra() {
  std::mt19937_64 gen(21);
  double chen = 0.0, reparam = 0.0, decay_worst = 0.0, trunc = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = walk(gen, 7, 3, 0.3), b = walk(gen, 5, 3, 0.3);
    const auto whole = truncated_signature(concat(a, b), 4);
    const auto prod = chen_product(truncated_signature(a, 4), truncated_signature(b, 4));
    for (std::size_t i = 0; i < whole.data().size(); ++i)
      chen = std::max(chen, std::abs(whole.data()[i] - prod.data()[i]));
    const auto s = walk(gen, 6, 2, 0.3);
    const auto s1 = truncated_signature(s, 4), s2 = truncated_signature(midpoints(s), 4);
    for (std::size_t i = 0; i < s1.data().size(); ++i) reparam = std::max(reparam, std::abs(s1.data()[i] - s2.data()[i]));
  }
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = walk(gen, 12, 3, 0.5);
    const double len = one_variation(p);
    const auto sig = truncated_signature(p, 6);
    double fact = 1.0;
    for (std::size_t k = 1; k <= 6; ++k) {
      fact *= double(k);
      decay_worst = std::max(decay_worst, sig.level_norm(k) / (std::pow(len, double(k)) / fact));
    }
  }
  KernelSpec pde = linear_plain(6);
  for (int trial = 0; trial < 3; ++trial) {
    const auto x = walk(gen, 5, 2, 0.2), y = walk(gen, 6, 2, 0.2);
    trunc = std::max(trunc, std::abs(truncated_kernel(x, y, 10, linear_plain(0)) - solve_goursat(x, y, pde)));
  }
  const bool ok = chen < 1e-10 && reparam < 1e-12 && decay_worst <= 1.0 + 1e-12 && trunc < 1e-3;
  return {ok, "Chen max err " + g(chen) + ", reparam " + g(reparam) + ", decay ratio max " + f(decay_worst, 3) +
                  " (<=1), |trunc N=10 - PDE| " + g(trunc) + " (<1e-3)"};
}

// ---------------------------------------------------------------- 4
Outcome type_one_rate() {
  const auto toy = shipped("toy-detect");
  const SignatureKernel k(toy.kernel);
  const auto phi = toy.transformer();
  const ModelPair gbm = toy.beliefs.front();
  const Mesh mesh{toy.path.dt, toy.h1, 0.0};
  auto prep = [&](std::vector<Stream> raw) {
    for (auto& s : raw) s = phi(s);
    return k.prepare_all(raw);
  };
  const auto bank = prep(simulate(gbm, mesh, 10000, 101));
  const auto null = bootstrap_null(k, bank, toy.h2, 1000, 202, 0.05);
  const std::size_t trials = 200;
  const auto fresh = prep(simulate(gbm, mesh, trials * toy.h2, 303));
  std::size_t rejects = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    PathRefs x, y;
    for (std::size_t i = 0; i < toy.h2; ++i) x.push_back(&fresh[t * toy.h2 + i]);
    CounterRng rng(404, t);
    for (auto i : draw_without_replacement(rng, bank.size(), toy.h2)) y.push_back(&bank[i]);
    rejects += two_sample_test(k, x, y, null).reject;
  }
  const double rate = double(rejects) / trials;
  return {rate >= 0.02 && rate <= 0.09, "type-I rate " + f(rate, 3) + " over 200 trials (need [0.02, 0.09])"};
}

// ---------------------------------------------------------------- 5
Outcome table2_ordering() {
  auto c = shipped("baseline-compare");
  c.n_runs = 20;
  const auto r = run_experiment(c);
  const double full = r.method("full").total().mean, trunc = r.method("truncated").total().mean,
               sig = r.method("sigcon").total().mean;
  const bool ok = full >= 0.85 && trunc <= full - 0.10 && sig < full && sig > trunc;
  return {ok, "total acc full " + f(full, 3) + ", sigcon " + f(sig, 3) + ", truncated " + f(trunc, 3) +
                  " (need full>=0.85, truncated<=full-0.10, full>sigcon>truncated); AUC full " +
                  f(r.method("full").auc().mean, 3) + ", truncated " + f(r.method("truncated").auc().mean, 3) +
                  ", sigcon " + f(r.method("sigcon").auc().mean, 3)};
}

// ---------------------------------------------------------------- 6
Outcome rank2_advantage() {
  auto c = shipped("rank2-compare");
  c.n_runs = 10;
  const auto r = run_experiment(c);
  const auto& r1 = r.method("rank1");
  const auto& r2 = r.method("rank2");
  const double t1 = r1.seconds_summary().mean, t2 = r2.seconds_summary().mean;
  const double ratio = t2 / t1;
  const bool ok = r2.total().mean > r1.total().mean && ratio <= 1000.0;
  return {ok, "total acc rank2 " + f(r2.total().mean, 3) + "+-" + f(r2.total().std, 3) + " vs rank1 " +
                  f(r1.total().mean, 3) + "+-" + f(r1.total().std, 3) + "; runtime per run " + g(t2) + "s vs " +
                  g(t1) + "s (ratio " + f(ratio, 1) + ", need <= 1000)"};
}

// ---------------------------------------------------------------- 7
Outcome jump_separation() {
  auto c = shipped("jump-compare");
  c.n_runs = 10;
  const auto r = run_experiment(c);
  const double full = r.method("full").total().mean, trunc = r.method("truncated").total().mean;
  return {full > trunc, "total acc untruncated " + f(full, 3) + "+-" + f(r.method("full").total().std, 3) +
                            " vs truncated " + f(trunc, 3) + "+-" + f(r.method("truncated").total().std, 3)};
}

// ---------------------------------------------------------------- 8
Outcome clustering() {
  std::string detail;
  bool ok = true;
  for (std::size_t d : {1, 10}) {
    auto c = shipped("cluster");
    c.n_runs = 3;
    for (auto& m : c.path.models) m.dim = d;
    // RBF distances grow like sqrt(d), so the bandwidth follows
    c.kernel.sigma1 *= std::sqrt(static_cast<double>(d));
    const auto r = run_experiment(c);
    const auto& acc = r.method("cluster").values.at("accuracy");
    const auto s = summarize(acc);
    const double lo = *std::min_element(acc.begin(), acc.end());
    ok = ok && s.mean >= 0.85;
    detail += "d=" + std::to_string(d) + ": mean acc " + f(s.mean, 3) + " (min " + f(lo, 3) + ") ";
  }
  return {ok, detail + "(need >= 0.85)"};
}

// ---------------------------------------------------------------- 9
Outcome scoring_identity() {
  KernelSpec spec;
  spec.truncated = true;
  spec.truncation = 3;
  spec.sigma1 = 0.2;
  const SignatureKernel k(spec);
  const auto phi = compose({Transform::increment(), Transform::time_norm(), Transform::state_norm()});
  auto bank = [&](double sigma, std::uint64_t seed) {
    auto raw = simulate_gbm(0.0, sigma, 1, Mesh{1.0 / 252, 8}, 20000, 1.0, seed);
    for (auto& p : raw) p = phi(p);
    return k.prepare_all(raw);
  };
  const double triples[3][3] = {{0.2, 0.3, 0.25}, {0.15, 0.4, 0.3}, {0.25, 0.2, 0.35}};
  double worst_z = 0.0;
  bool signs = true;
  std::string detail;
  for (int t = 0; t < 3; ++t) {
    const auto p = bank(triples[t][0], 10 + t), q = bank(triples[t][1], 20 + t), z = bank(triples[t][2], 30 + t);
    CounterRng rng(99, t);
    std::vector<double> on_z, on_p, on_q;
    auto draw = [&](const std::vector<PreparedPath>& b) {
      PathRefs out;
      for (auto i : draw_without_replacement(rng, b.size(), 32)) out.push_back(&b[i]);
      return out;
    };
    for (int i = 0; i < 1000; ++i) {
      const auto ps = draw(p), qs = draw(q);
      on_z.push_back(similarity_score(k, ps, qs, z[rng() % z.size()]));
      if (i < 300) {
        on_p.push_back(similarity_score(k, ps, qs, p[rng() % p.size()]));
        on_q.push_back(similarity_score(k, ps, qs, q[rng() % q.size()]));
      }
    }
    const auto s = summarize(on_z);
    const double se = s.std / std::sqrt(double(s.n));
    const double ref = ensemble_mmd(k, refs_of(p), refs_of(z)) - ensemble_mmd(k, refs_of(q), refs_of(z));
    worst_z = std::max(worst_z, std::abs(s.mean - ref) / se);
    const double mp = summarize(on_p).mean, mq = summarize(on_q).mean;
    signs = signs && mp <= 0.0 && mq >= 0.0;
    detail += "[" + g(s.mean) + " vs " + g(ref) + ", E_P " + g(mp) + ", E_Q " + g(mq) + "] ";
  }
  return {worst_z < 3.0 && signs, "max |MC - D^2 diff| = " + f(worst_z, 2) + " SE (need < 3); " + detail};
}

// ---------------------------------------------------------------- 10
double total_variation(const std::vector<std::optional<double>>& s) {
  double tv = 0.0;
  std::optional<double> prev;
  for (const auto& x : s) {
    if (x && prev) tv += std::abs(*x - *prev);
    if (x) prev = x;
  }
  return tv;
}

Outcome auto_evaluator() {
  const auto toy = shipped("toy-detect");
  const SignatureKernel k(toy.kernel);
  const auto phi = toy.transformer();
  RegimeSwitchSpec spec = toy.path;
  spec.h1 = toy.h1;
  spec.seed = 1;
  const auto path = simulate_regime_switching(spec);
  const auto sub = prepare_subpaths(k, extract_subpaths(path.path, toy.h1), phi);
  const BandGram gram(k, sub, toy.h2 + 5);
  // compare over the indices where both series are defined
  auto one = auto_evaluate(gram, toy.h2, {1});
  auto five = auto_evaluate(gram, toy.h2, {1, 2, 3, 4, 5});
  for (std::size_t i = 0; i < 5 && i < one.size(); ++i) one[i].reset();
  const double tv1 = total_variation(one), tv5 = total_variation(five);

  // H0: one regime only
  RegimeSwitchSpec h0 = spec;
  h0.lambda1 = 0.0;
  h0.horizon = 8.0;
  h0.seed = 2;
  const auto flat = simulate_regime_switching(h0);
  const auto sub0 = prepare_subpaths(k, extract_subpaths(flat.path, toy.h1), phi);
  const auto scores = auto_evaluate(BandGram(k, sub0, toy.h2 + 5), toy.h2, {1, 2, 3, 4, 5});
  const auto roll = rolling_threshold(scores, 200, 0.05);
  std::size_t judged = 0, flagged = 0;
  for (const auto& fl : roll.flags)
    if (fl) {
      ++judged;
      flagged += *fl;
    }
  const double rate = double(flagged) / double(judged);
  const bool ok = tv5 < tv1 && std::abs(rate - 0.05) <= 0.05;
  return {ok, "TV 5-lag " + f(tv5, 1) + " vs 1-lag " + f(tv1, 1) + " (need 5-lag < 1-lag); rolling H0 flag rate " +
                  f(rate, 3) + " over " + std::to_string(judged) + " ensembles (need 0.05 +- 0.05)"};
}

// ---------------------------------------------------------------- 11
Outcome nonmarkov() {
  auto c = shipped("nonmarkov");
  c.n_runs = 10;
  const auto r = run_experiment(c);
  const std::size_t up = r.details.at("runs_second_half_higher").get<std::size_t>();
  const auto& m = r.method("conditional");
  return {up >= 8, std::to_string(up) + "/10 runs with higher second-half mean score (need >= 8); mean first " +
                       g(summarize(m.values.at("first_half_mean")).mean) + ", second " +
                       g(summarize(m.values.at("second_half_mean")).mean)};
}

// ---------------------------------------------------------------- 12
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome realdata_smoke() {
  const auto t0 = Clock::now();
  auto c = shipped("realdata-auto");
  c.csv.path = std::string(SOURCE_DIR) + "/" + c.csv.path;
  const fs::path base = fs::temp_directory_path() / "sigregime_acceptance_realdata";
  fs::remove_all(base);
  write_artifacts(run_experiment(c), (base / "a").string());
  write_artifacts(run_experiment(c), (base / "b").string());
  std::size_t files = 0, same = 0;
  for (const auto& e : fs::directory_iterator(base / "a")) {
    if (e.path().filename() == "timing.json") continue;
    ++files;
    same += slurp(e.path()) == slurp(base / "b" / e.path().filename());
  }
  const auto report = nlohmann::json::parse(slurp(base / "a" / "report.json"));
  const auto& d = report["details"];
  fs::remove_all(base);
  const double secs = since(t0);
  const bool ok = files >= 5 && same == files && d["ingest"]["columns"].size() == 7 && secs < 120.0;
  return {ok, std::to_string(same) + "/" + std::to_string(files) + " artifacts identical across reruns; " +
                  d["ingest"]["rows"].dump() + " rows x " + std::to_string(d["ingest"]["columns"].size()) +
                  " channels, " + d["flagged"].dump() + " flags of " + d["judged"].dump() + "; " + f(secs, 1) +
                  "s (need < 120)"};
}

struct Criterion {
  int id;
  const char* name;
  double budget;  // seconds
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  int only = 0;
  std::string report_path;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--strict")) strict = true;
    else if (!std::strncmp(argv[i], "--only=", 7)) only = std::atoi(argv[i] + 7);
    else if (!std::strncmp(argv[i], "--report=", 9)) report_path = argv[i] + 9;
  }
  // ctest hides stdout of passing tests, so keep a copy on disk too
  std::FILE* report = report_path.empty() ? nullptr : std::fopen(report_path.c_str(), "w");
  const std::vector<Criterion> all{
      {1, "kernel correctness", 1.0, kernel_correctness},
      {2, "PDE convergence", 30.0, pde_convergence},
      {3, "signature algebra", 30.0, signature_algebra},
      {4, "two-sample calibration", 300.0, type_one_rate},
      {5, "full vs truncated vs SIG-CON", 1800.0, table2_ordering},
      {6, "rank-2 advantage", 2700.0, rank2_advantage},
      {7, "jump-diffusion separation", 1800.0, jump_separation},
      {8, "clustering", 600.0, clustering},
      {9, "scoring-rule identity", 300.0, scoring_identity},
      {10, "auto-evaluator", 300.0, auto_evaluator},
      {11, "non-Markov single path", 900.0, nonmarkov},
      {12, "real-data smoke", 120.0, realdata_smoke},
  };
  int failed = 0, errors = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = Clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    const double secs = since(t0);
    const bool in_time = secs <= c.budget;
    const bool pass = o.pass && in_time;
    failed += !pass;
    for (std::FILE* out : {stdout, report}) {
      if (!out) continue;
      std::fprintf(out, "[%s] %2d %-30s %s | %.1fs (budget %.0fs)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                   o.detail.c_str(), secs, c.budget);
      std::fflush(out);
    }
  }
  std::printf("acceptance: %d failed\n", failed);
  if (report) {
    std::fprintf(report, "acceptance: %d failed\n", failed);
    std::fclose(report);
  }
  if (errors) return 2;
  return strict && failed ? 1 : 0;
}
