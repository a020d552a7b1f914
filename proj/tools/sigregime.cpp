#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "sigregime/error.hpp"
#include "sigregime/experiments.hpp"
#include "sigregime/ingest.hpp"
#include "sigregime/parallel.hpp"

using namespace sigregime;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

ExperimentConfig load_with(const std::string& path, const Overrides& o) {
  ExperimentConfig c = load_config(path);
  if (o.seed) c.seed = *o.seed;
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.threads) {
    require(*o.threads >= 1, ErrorKind::Config, "--threads must be >= 1");
    c.threads = *o.threads;
  }
  return c;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("--out-dir", o.out_dir, "Override the output directory");
  cmd->add_option("--threads", o.threads, "Worker threads (default: SIGREGIME_THREADS or 1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regime detection on streamed data with signature-kernel MMD"};
  app.require_subcommand(1);

  Overrides run_o, null_o;
  std::string run_cfg, null_cfg, csv_in, csv_out, time_col;
  std::vector<std::string> columns;
  double max_bad = 0.01;

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", run_cfg, "Config file")->required();
  add_common(run, run_o);

  auto* ingest = app.add_subcommand("ingest", "Parse a price CSV into a time-stamped stream");
  ingest->add_option("--csv", csv_in, "Input CSV")->required();
  ingest->add_option("--out", csv_out, "Output CSV")->required();
  ingest->add_option("--time-column", time_col, "Timestamp column (default: first)");
  ingest->add_option("--columns", columns, "Value columns (default: all others)");
  ingest->add_option("--max-bad-fraction", max_bad, "Tolerated share of unparseable rows");

  auto* null = app.add_subcommand("bootstrap-null", "Simulate belief banks and their null distributions");
  null->add_option("--config", null_cfg, "Config file")->required();
  add_common(null, null_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto c = load_with(run_cfg, run_o);
      const auto r = run_experiment(c);
      write_artifacts(r, c.out_dir);
      std::cout << r.report_text() << "artifacts: " << c.out_dir << "\n";
    } else if (*ingest) {
      const auto r = ingest_csv(csv_in, CsvSchema{time_col, columns, max_bad});
      write_stream_csv(csv_out, r);
      std::cout << "rows: " << r.stream.size() << " channels: " << r.stream.dim()
                << " dropped (missing): " << r.missing_rows << " dropped (unparseable): " << r.bad_rows << "\n";
    } else if (*null) {
      const auto c = load_with(null_cfg, null_o);
      const auto r = run_bootstrap_null(c);
      write_artifacts(r, c.out_dir);
      std::cout << r.report_text() << "artifacts: " << c.out_dir << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error[" << kind_name(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
