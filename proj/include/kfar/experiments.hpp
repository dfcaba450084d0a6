#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kfar/config.hpp"
#include "kfar/parallel.hpp"
#include "kfar/table_io.hpp"

namespace kfar {

/// One CSV written as `<experiment>.<name>.csv`, with `meta` merged into its
/// manifest.
struct Artifact {
  std::string name;
  Table table;
  nlohmann::json meta = nlohmann::json::object();
};

struct ExperimentOutput {
  Experiment experiment = Experiment::compare;
  ExperimentConfig config;  // resolved
  std::vector<Artifact> artifacts;
  nlohmann::json summary = nlohmann::json::object();

  const Artifact& artifact(const std::string& name) const;
};

/// Comparison of kalman_oracle, ar_truncated (one per depth),
/// persistence, ogd and best_fixed over `runs` simulated trajectories.
ExperimentOutput run_comparison(const ExperimentConfig& config, const RunOptions& options = {});

/// Kalman-to-AR loss ratio over a (w, v) grid, AR depth = depths[0].
ExperimentOutput noise_sweep(const ExperimentConfig& config, const RunOptions& options = {});

/// AR(s+1) error and remainder size against s for each (W, v) setting.
ExperimentOutput depth_sweep(const ExperimentConfig& config, const RunOptions& options = {});

/// The W = 0 scalar and rotation systems, filter started from the wrong prior.
ExperimentOutput counterexample_run(const ExperimentConfig& config,
                                    const RunOptions& options = {});

/// OGD against best_fixed and a finite Kalman family on one clipped stream.
ExperimentOutput regret_eval(const ExperimentConfig& config, const RunOptions& options = {});

/// OGD loss traces for each learning-rate constant.
ExperimentOutput lr_study(const ExperimentConfig& config, const RunOptions& options = {});

/// Reads, differences and scores a user series with OGD and persistence.
ExperimentOutput run_ingest(const ExperimentConfig& config, const RunOptions& options = {});

ExperimentOutput run_experiment(Experiment experiment, const ExperimentConfig& config,
                                const RunOptions& options = {});

struct SeriesStats {
  std::size_t length = 0;
  double min = 0.0;
  double max = 0.0;
};

std::vector<double> difference(std::span<const double> series, int order);

/// Loads the target column and applies `differencing`. Errors name the
/// offending line.
std::vector<double> ingest_series(const SeriesFile& file, SeriesStats* stats = nullptr);

/// Writes every artifact with its manifest and `<experiment>.<name>.summary.json`.
/// Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ExperimentOutput& output,
                                                 const std::filesystem::path& dir);

}  // namespace kfar
