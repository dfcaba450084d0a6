#include "kfar/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace kfar {

namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 7> kExperimentNames{{
    {Experiment::compare, "compare"},
    {Experiment::noise_sweep, "noise-sweep"},
    {Experiment::depth_sweep, "depth-sweep"},
    {Experiment::counterexample, "counterexample"},
    {Experiment::regret, "regret"},
    {Experiment::ingest, "ingest"},
    {Experiment::lr_study, "lr-study"},
}};

std::string where(const std::string& key) { return "config key '" + key + "'"; }

void check_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError("config section '" + section + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in config section '" + section + "'");
    }
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(key) + " has the wrong type");
  }
}

std::vector<double> real_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ConfigError(where(key) + " must be a list");
  std::vector<double> out;
  for (const auto& item : node) out.push_back(scalar<double>(item, key));
  return out;
}

std::vector<int> int_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ConfigError(where(key) + " must be a list");
  std::vector<int> out;
  for (const auto& item : node) out.push_back(scalar<int>(item, key));
  return out;
}

Vector vector_node(const YAML::Node& node, const std::string& key) {
  const auto values = real_list(node, key);
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Matrix matrix_node(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() == 0) {
    throw ConfigError(where(key) + " must be a nonempty list of rows");
  }
  const auto rows = static_cast<Eigen::Index>(node.size());
  Matrix out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = real_list(node[i], key);
    if (i == 0) out.resize(rows, static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != out.cols()) {
      throw ConfigError(where(key) + " has ragged rows");
    }
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = row[j];
  }
  return out;
}

LdsParams system_node(const YAML::Node& node, const std::string& section) {
  check_keys(node, section, {"G", "F", "v", "W", "w", "m0", "C0"});
  if (!node["G"] || !node["F"] || !node["v"]) {
    throw ConfigError("config section '" + section + "' needs G, F and v");
  }
  if (node["W"] && node["w"]) {
    throw ConfigError("config section '" + section + "' sets both W and w");
  }
  LdsParams p;
  p.G = matrix_node(node["G"], section + ".G");
  p.F = vector_node(node["F"], section + ".F");
  p.v = scalar<double>(node["v"], section + ".v");
  const Eigen::Index n = p.F.size();
  if (node["W"]) {
    p.W = matrix_node(node["W"], section + ".W");
  } else if (node["w"]) {
    p.W = scalar<double>(node["w"], section + ".w") * Matrix::Identity(n, n);
  } else {
    throw ConfigError("config section '" + section + "' needs W or w");
  }
  p.m0 = node["m0"] ? vector_node(node["m0"], section + ".m0") : Vector(Vector::Zero(n));
  p.C0 = node["C0"] ? matrix_node(node["C0"], section + ".C0") : Matrix(Matrix::Identity(n, n));
  try {
    return validate_generator(std::move(p));
  } catch (const InvalidArgument& e) {
    throw ConfigError("config section '" + section + "': " + e.what());
  }
}

void apply(ExperimentConfig& cfg, const YAML::Node& root) {
  check_keys(root, "<root>",
             {"name", "system", "T", "runs", "seed", "depths", "ogd_s", "D", "c", "burn_in",
              "clip_bound", "output_dir", "series", "noise_sweep", "depth_sweep",
              "counterexample", "regret", "lr_study"});
  if (root["name"]) cfg.name = scalar<std::string>(root["name"], "name");
  if (root["system"]) cfg.system = system_node(root["system"], "system");
  if (root["T"]) cfg.T = scalar<int>(root["T"], "T");
  if (root["runs"]) cfg.runs = scalar<int>(root["runs"], "runs");
  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["depths"]) cfg.depths = int_list(root["depths"], "depths");
  if (root["ogd_s"]) cfg.ogd_s = scalar<int>(root["ogd_s"], "ogd_s");
  if (root["D"]) cfg.D = scalar<double>(root["D"], "D");
  if (root["c"]) cfg.c = scalar<double>(root["c"], "c");
  if (const auto n = root["burn_in"]) {
    cfg.burn_in = n.IsNull() ? std::nullopt : std::optional<int>(scalar<int>(n, "burn_in"));
  }
  if (const auto n = root["clip_bound"]) {
    if (n.IsNull()) {
      cfg.clip_bound.reset();
    } else if (n.IsScalar() && n.Scalar() == "auto") {
      cfg.clip_bound = ClipBound{true, 0.0};
    } else {
      cfg.clip_bound = ClipBound{false, scalar<double>(n, "clip_bound")};
    }
  }
  if (root["output_dir"]) cfg.output_dir = scalar<std::string>(root["output_dir"], "output_dir");
  if (const auto n = root["series"]) {
    if (n.IsNull()) {
      cfg.series.reset();
    } else {
      check_keys(n, "series", {"path", "column", "differencing"});
      SeriesFile sf;
      if (!n["path"]) throw ConfigError("config section 'series' needs path");
      sf.path = scalar<std::string>(n["path"], "series.path");
      if (n["column"]) sf.column = scalar<std::string>(n["column"], "series.column");
      if (n["differencing"]) sf.differencing = scalar<int>(n["differencing"], "series.differencing");
      cfg.series = sf;
    }
  }
  if (const auto n = root["noise_sweep"]) {
    check_keys(n, "noise_sweep", {"w_grid", "v_grid"});
    if (n["w_grid"]) cfg.noise_sweep.w_grid = real_list(n["w_grid"], "noise_sweep.w_grid");
    if (n["v_grid"]) cfg.noise_sweep.v_grid = real_list(n["v_grid"], "noise_sweep.v_grid");
  }
  if (const auto n = root["depth_sweep"]) {
    check_keys(n, "depth_sweep", {"settings", "remainder_t"});
    if (const auto list = n["settings"]) {
      if (!list.IsSequence()) throw ConfigError(where("depth_sweep.settings") + " must be a list");
      cfg.depth_sweep.settings.clear();
      for (const auto& item : list) {
        check_keys(item, "depth_sweep.settings", {"tag", "w", "v"});
        if (!item["tag"] || !item["w"] || !item["v"]) {
          throw ConfigError("depth_sweep.settings entries need tag, w and v");
        }
        cfg.depth_sweep.settings.push_back({scalar<std::string>(item["tag"], "tag"),
                                            scalar<double>(item["w"], "w"),
                                            scalar<double>(item["v"], "v")});
      }
    }
    if (n["remainder_t"]) {
      cfg.depth_sweep.remainder_t = scalar<int>(n["remainder_t"], "depth_sweep.remainder_t");
    }
  }
  if (const auto n = root["counterexample"]) {
    check_keys(n, "counterexample", {"v", "m0_true", "s", "rotation_angle"});
    auto& ce = cfg.counterexample;
    if (n["v"]) ce.v = scalar<double>(n["v"], "counterexample.v");
    if (n["m0_true"]) ce.m0_true = scalar<double>(n["m0_true"], "counterexample.m0_true");
    if (n["s"]) ce.s = scalar<int>(n["s"], "counterexample.s");
    if (n["rotation_angle"]) {
      ce.rotation_angle = scalar<double>(n["rotation_angle"], "counterexample.rotation_angle");
    }
  }
  if (const auto n = root["regret"]) {
    check_keys(n, "regret", {"checkpoints", "stream", "square_period", "family", "eps_declared"});
    auto& rg = cfg.regret;
    if (n["checkpoints"]) rg.checkpoints = int_list(n["checkpoints"], "regret.checkpoints");
    if (n["stream"]) rg.stream = scalar<std::string>(n["stream"], "regret.stream");
    if (n["square_period"]) rg.square_period = scalar<int>(n["square_period"], "regret.square_period");
    if (n["eps_declared"]) rg.eps_declared = scalar<double>(n["eps_declared"], "regret.eps_declared");
    if (const auto fam = n["family"]) {
      if (!fam.IsSequence()) throw ConfigError(where("regret.family") + " must be a list");
      rg.family.clear();
      for (std::size_t i = 0; i < fam.size(); ++i) {
        rg.family.push_back(system_node(fam[i], "regret.family[" + std::to_string(i) + "]"));
      }
    }
  }
  if (const auto n = root["lr_study"]) {
    check_keys(n, "lr_study", {"c_values", "synthetic", "length"});
    auto& lr = cfg.lr_study;
    if (n["c_values"]) lr.c_values = real_list(n["c_values"], "lr_study.c_values");
    if (n["synthetic"]) lr.synthetic = scalar<std::string>(n["synthetic"], "lr_study.synthetic");
    if (n["length"]) lr.length = scalar<int>(n["length"], "lr_study.length");
  }
}

nlohmann::json matrix_json(const Matrix& X) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < X.cols(); ++j) row.push_back(X(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json vector_json(const Vector& x) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& [k, name] : kExperimentNames) {
    if (k == e) return name;
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (const auto& [k, n] : kExperimentNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig cfg;
  switch (e) {
    case Experiment::compare:
      break;
    case Experiment::noise_sweep:
      cfg.T = 50;
      cfg.runs = 10;
      break;
    case Experiment::depth_sweep:
      cfg.T = 200;
      cfg.runs = 100;
      cfg.depths = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
      break;
    case Experiment::counterexample:
      cfg.T = 2000;
      cfg.runs = 50;
      break;
    case Experiment::regret:
      // example_system dynamics with noise std divided by 10, so B0 stays near 10.
      cfg.system = example_system(0.005, 0.005);
      cfg.runs = 1;
      cfg.clip_bound = ClipBound{true, 0.0};
      break;
    case Experiment::ingest:
    case Experiment::lr_study:
      cfg.runs = 1;
      break;
  }
  return cfg;
}

ExperimentConfig parse_config(std::string_view text, Experiment e) {
  ExperimentConfig cfg = default_config(e);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& ex) {
    throw ConfigError(std::string("cannot parse config: ") + ex.what());
  }
  if (root.IsNull()) return cfg;
  if (root.IsMap() && root["config"] && root["experiment"]) root = root["config"];
  apply(cfg, root);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, Experiment e) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), e);
}

ExperimentConfig resolve_config(ExperimentConfig cfg, Experiment e) {
  require(cfg.runs >= 1, "runs must be >= 1");
  require(cfg.T >= 0, "T must be nonnegative");
  require(!cfg.depths.empty(), "depths must be nonempty");
  for (int s : cfg.depths) require(s >= 0, "depths must be nonnegative");
  const int max_depth = *std::max_element(cfg.depths.begin(), cfg.depths.end());
  require(cfg.ogd_s >= 1, "ogd_s must be >= 1");
  require(cfg.D > 0.0, "D must be positive");
  require(cfg.c > 0.0, "c must be positive");
  if (cfg.burn_in) require(*cfg.burn_in >= 0, "burn_in must be nonnegative");
  if (cfg.series) {
    require(cfg.series->differencing >= 0 && cfg.series->differencing <= 2,
            "series.differencing must be 0, 1 or 2");
  }
  try {
    validate(cfg.system);
  } catch (const InvalidArgument& ex) {
    throw ConfigError(std::string("system: ") + ex.what());
  }

  switch (e) {
    case Experiment::compare:
    case Experiment::depth_sweep:
      require(cfg.T >= max_depth + 2, "T must be at least max(depths) + 2");
      require(cfg.T >= cfg.ogd_s + 2, "T must be at least ogd_s + 2");
      break;
    case Experiment::noise_sweep:
      require(!cfg.noise_sweep.w_grid.empty() && !cfg.noise_sweep.v_grid.empty(),
              "noise_sweep grids must be nonempty");
      for (double w : cfg.noise_sweep.w_grid) require(w > 0.0, "noise_sweep.w_grid must be positive");
      for (double v : cfg.noise_sweep.v_grid) require(v > 0.0, "noise_sweep.v_grid must be positive");
      require(cfg.T >= max_depth + 2, "T must be at least max(depths) + 2");
      break;
    case Experiment::counterexample:
      require(cfg.counterexample.v > 0.0, "counterexample.v must be positive");
      require(cfg.counterexample.s >= 0, "counterexample.s must be nonnegative");
      require(cfg.T >= cfg.counterexample.s + 8, "T too short for counterexample.s");
      break;
    case Experiment::regret: {
      require(cfg.clip_bound.has_value(), "regret needs clip_bound (a number or 'auto')");
      require(cfg.clip_bound->automatic || cfg.clip_bound->value > 0.0, "clip_bound must be positive");
      require(cfg.regret.stream == "realizable" || cfg.regret.stream == "square_wave",
              "regret.stream must be 'realizable' or 'square_wave'");
      require(cfg.regret.square_period >= 2, "regret.square_period must be >= 2");
      for (int T : cfg.regret.checkpoints) require(T >= 0, "regret.checkpoints must be nonnegative");
      require(cfg.regret.eps_declared >= 0.0, "regret.eps_declared must be nonnegative");
      if (cfg.regret.family.empty()) {
        for (double scale : {1.0, 0.8, 1.2}) {
          LdsParams member = cfg.system;
          member.G.diagonal() *= scale;
          member.m0 = Vector::Zero(member.dim());
          member.C0 = Matrix::Identity(member.dim(), member.dim());
          cfg.regret.family.push_back(member);
        }
      }
      for (const auto& member : cfg.regret.family) {
        try {
          validate(member);
        } catch (const InvalidArgument& ex) {
          throw ConfigError(std::string("regret.family: ") + ex.what());
        }
      }
      break;
    }
    case Experiment::ingest:
      require(cfg.series.has_value(), "ingest needs a series file");
      break;
    case Experiment::lr_study:
      require(!cfg.lr_study.c_values.empty(), "lr_study.c_values must be nonempty");
      for (double c : cfg.lr_study.c_values) require(c > 0.0, "lr_study.c_values must be positive");
      require(cfg.series.has_value() || cfg.lr_study.synthetic == "stationary" ||
                  cfg.lr_study.synthetic == "trending",
              "lr_study.synthetic must be 'stationary' or 'trending'");
      require(cfg.lr_study.length >= cfg.ogd_s + 2, "lr_study.length too short");
      break;
  }
  return cfg;
}

nlohmann::json to_json(const LdsParams& p) {
  return {{"G", matrix_json(p.G)}, {"F", vector_json(p.F)}, {"v", p.v},
          {"W", matrix_json(p.W)}, {"m0", vector_json(p.m0)}, {"C0", matrix_json(p.C0)}};
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["system"] = to_json(cfg.system);
  j["T"] = cfg.T;
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  j["depths"] = cfg.depths;
  j["ogd_s"] = cfg.ogd_s;
  j["D"] = cfg.D;
  j["c"] = cfg.c;
  j["burn_in"] = cfg.burn_in ? nlohmann::json(*cfg.burn_in) : nlohmann::json(nullptr);
  if (!cfg.clip_bound) {
    j["clip_bound"] = nullptr;
  } else if (cfg.clip_bound->automatic) {
    j["clip_bound"] = "auto";
  } else {
    j["clip_bound"] = cfg.clip_bound->value;
  }
  j["output_dir"] = cfg.output_dir;
  if (cfg.series) {
    j["series"] = {{"path", cfg.series->path},
                   {"column", cfg.series->column},
                   {"differencing", cfg.series->differencing}};
  } else {
    j["series"] = nullptr;
  }
  j["noise_sweep"] = {{"w_grid", cfg.noise_sweep.w_grid}, {"v_grid", cfg.noise_sweep.v_grid}};
  nlohmann::json settings = nlohmann::json::array();
  for (const auto& s : cfg.depth_sweep.settings) {
    settings.push_back({{"tag", s.tag}, {"w", s.w}, {"v", s.v}});
  }
  j["depth_sweep"] = {{"settings", settings}, {"remainder_t", cfg.depth_sweep.remainder_t}};
  j["counterexample"] = {{"v", cfg.counterexample.v},
                         {"m0_true", cfg.counterexample.m0_true},
                         {"s", cfg.counterexample.s},
                         {"rotation_angle", cfg.counterexample.rotation_angle}};
  nlohmann::json family = nlohmann::json::array();
  for (const auto& member : cfg.regret.family) family.push_back(to_json(member));
  j["regret"] = {{"checkpoints", cfg.regret.checkpoints},
                 {"stream", cfg.regret.stream},
                 {"square_period", cfg.regret.square_period},
                 {"family", family},
                 {"eps_declared", cfg.regret.eps_declared}};
  j["lr_study"] = {{"c_values", cfg.lr_study.c_values},
                   {"synthetic", cfg.lr_study.synthetic},
                   {"length", cfg.lr_study.length}};
  return j;
}

}  // namespace kfar
