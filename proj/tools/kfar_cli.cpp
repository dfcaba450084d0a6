// kfar: runs one experiment and writes its CSV artifacts and manifests.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kfar/experiments.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  int threads = 0;
  bool serial = false;
  std::string series;
  std::string column;
  std::optional<int> diff;
  std::optional<double> c;
};

const char* describe(kfar::Experiment e) {
  switch (e) {
    case kfar::Experiment::compare: return "Kalman vs AR truncation vs baselines on simulated data";
    case kfar::Experiment::noise_sweep: return "AR/Kalman error ratio over a noise grid";
    case kfar::Experiment::depth_sweep: return "error and remainder decay against AR depth";
    case kfar::Experiment::counterexample: return "filter-limit drift for W = 0 systems";
    case kfar::Experiment::regret: return "OGD regret against fixed and Kalman comparators";
    case kfar::Experiment::ingest: return "load a real series and score OGD on it";
    case kfar::Experiment::lr_study: return "OGD cumulative loss across learning-rate constants";
  }
  return "";
}

int run(kfar::Experiment e, const Flags& f) {
  kfar::ExperimentConfig cfg =
      f.config.empty() ? kfar::default_config(e) : kfar::load_config(f.config, e);
  if (f.seed) cfg.seed = *f.seed;
  if (f.runs) cfg.runs = *f.runs;
  if (f.c) cfg.c = *f.c;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!f.series.empty()) {
    if (!cfg.series) cfg.series = kfar::SeriesFile{};
    cfg.series->path = f.series;
  }
  if (!f.column.empty() || f.diff) {
    if (!cfg.series) throw kfar::ConfigError("--column and --diff need a series file");
    if (!f.column.empty()) cfg.series->column = f.column;
    if (f.diff) cfg.series->differencing = *f.diff;
  }
  const kfar::RunOptions options{
      f.serial ? kfar::Execution::serial : kfar::Execution::parallel, f.threads};
  const auto output = kfar::run_experiment(e, cfg, options);
  for (const auto& path : kfar::write_outputs(output, cfg.output_dir)) {
    std::cout << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kalman filtering, AR truncation and online forecasting experiments"};
  app.set_version_flag("--version", std::string(KFAR_VERSION));
  app.require_subcommand(1);

  Flags flags;
  std::optional<kfar::Experiment> chosen;
  for (auto e : {kfar::Experiment::compare, kfar::Experiment::noise_sweep,
                 kfar::Experiment::depth_sweep, kfar::Experiment::counterexample,
                 kfar::Experiment::regret, kfar::Experiment::ingest,
                 kfar::Experiment::lr_study}) {
    auto* sub = app.add_subcommand(std::string(kfar::experiment_name(e)), describe(e));
    sub->add_option("--config", flags.config, "YAML config (or a run manifest)");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "base seed");
    sub->add_option("--runs", flags.runs, "number of runs")->check(CLI::PositiveNumber);
    sub->add_option("--threads", flags.threads, "worker threads (0: default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--serial", flags.serial, "run work items sequentially");
    sub->add_option("--c", flags.c, "OGD learning-rate constant");
    if (e == kfar::Experiment::ingest || e == kfar::Experiment::lr_study) {
      sub->add_option("--series", flags.series, "CSV file with a header row");
      sub->add_option("--column", flags.column, "column name or zero-based index");
      sub->add_option("--diff", flags.diff, "differencing order")->check(CLI::Range(0, 2));
    }
    sub->callback([&chosen, e] { chosen = e; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return run(*chosen, flags);
  } catch (const kfar::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const kfar::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
