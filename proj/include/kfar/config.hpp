#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kfar/lds_model.hpp"

namespace kfar {

/// Raised for unreadable or inconsistent configuration.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Experiment { compare, noise_sweep, depth_sweep, counterexample, regret, ingest, lr_study };

std::string_view experiment_name(Experiment e);
Experiment parse_experiment(std::string_view name);

struct SeriesFile {
  std::string path;
  std::string column = "0";  // header name, or a zero-based index
  int differencing = 0;
};

/// `auto` resolves to 6x the stationary output standard deviation.
struct ClipBound {
  bool automatic = false;
  double value = 0.0;
};

struct NoiseSweepSettings {
  std::vector<double> w_grid{0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> v_grid{0.1, 0.25, 0.5, 0.75, 1.0};
};

struct DepthSetting {
  std::string tag;
  double w = 0.0;
  double v = 0.0;
};

struct DepthSweepSettings {
  std::vector<DepthSetting> settings{
      {"w0.1", 0.1, 0.1}, {"w0.1", 0.1, 1.0}, {"w1.0", 1.0, 0.1}, {"w1.0", 1.0, 1.0}};
  int remainder_t = 0;  // 0 means T/2
};

struct CounterexampleSettings {
  double v = 0.5;
  double m0_true = 1.0;
  int s = 3;
  double rotation_angle = 0.5;
};

struct RegretSettings {
  std::vector<int> checkpoints{500, 2000, 8000};
  std::string stream = "realizable";  // or "square_wave"
  int square_period = 20;
  std::vector<LdsParams> family;  // empty: true system and +-20% on diag(G)
  double eps_declared = 1e-4;     // per-step average excess loss, in units of B0^2
};

struct LrStudySettings {
  std::vector<double> c_values{0.1, 1.0, 10.0};
  std::string synthetic = "stationary";  // used when no series file is given
  int length = 600;
};

struct ExperimentConfig {
  std::string name = "example";
  LdsParams system = example_system(0.5, 0.5);
  int T = 500;
  int runs = 100;
  std::uint64_t seed = 1;
  std::vector<int> depths{1};
  int ogd_s = 2;
  double D = 1.0;
  double c = 1.0;
  std::optional<int> burn_in;
  std::optional<ClipBound> clip_bound;
  std::string output_dir = "out";
  std::optional<SeriesFile> series;

  NoiseSweepSettings noise_sweep;
  DepthSweepSettings depth_sweep;
  CounterexampleSettings counterexample;
  RegretSettings regret;
  LrStudySettings lr_study;
};

/// Default sizes for each experiment.
ExperimentConfig default_config(Experiment e);

/// Overlays a YAML (or JSON) document onto the defaults for `e`. A run
/// manifest is accepted as well; its `config` member is used.
ExperimentConfig load_config(const std::filesystem::path& path, Experiment e);
ExperimentConfig parse_config(std::string_view text, Experiment e);

/// Fills derived defaults (e.g. the regret family) and checks invariants.
ExperimentConfig resolve_config(ExperimentConfig config, Experiment e);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const LdsParams& params);

}  // namespace kfar
