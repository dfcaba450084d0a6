#include "kfar/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "kfar/ar_truncation.hpp"
#include "kfar/baselines.hpp"
#include "kfar/kalman.hpp"
#include "kfar/ogd.hpp"
#include "kfar/rng.hpp"

namespace kfar {

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation; zero for a single value.
MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size() / 2;
  return xs.size() % 2 ? xs[k] : 0.5 * (xs[k - 1] + xs[k]);
}

double fitted_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json number_or_null(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

void clip(std::vector<double>& ys, double bound) {
  for (double& y : ys) y = std::clamp(y, -bound, bound);
}

double resolve_clip(const ClipBound& cb, const LdsParams& system) {
  return cb.automatic ? 6.0 * stationary_output_std(system) : cb.value;
}

LdsParams with_noise(const LdsParams& base, double w, double v) {
  LdsParams p = base;
  p.W = w * Matrix::Identity(base.dim(), base.dim());
  p.v = v;
  return p;
}

Table series_table(const std::vector<SeriesPoint>& points) {
  Table t{{"t", "value"}, {}};
  for (const auto& p : points) t.add_row({std::int64_t{p.t}, p.value});
  return t;
}

ExperimentOutput make_output(Experiment e, const ExperimentConfig& cfg) {
  ExperimentOutput out;
  out.experiment = e;
  out.config = cfg;
  return out;
}

// OGD over ys from t = s, one loss per step.
std::vector<double> ogd_losses(std::span<const double> ys, int s, double D, double c,
                               std::vector<double>* predictions = nullptr) {
  std::vector<double> losses;
  OgdState state = ogd_init(s, D, c);
  for (std::size_t t = static_cast<std::size_t>(s); t < ys.size(); ++t) {
    auto step = ogd_step(state, ys[t], ys.first(t));
    state = std::move(step.state);
    losses.push_back(step.loss);
    if (predictions) predictions->push_back(step.prediction);
  }
  return losses;
}

// ---- compare ------------------------------------------------------------

struct CompareRun {
  std::vector<std::vector<double>> sq;  // [predictor][t - t0]
  std::vector<double> rmse;
};

}  // namespace

const Artifact& ExperimentOutput::artifact(const std::string& name) const {
  for (const auto& a : artifacts) {
    if (a.name == name) return a;
  }
  throw InvalidArgument("no artifact named '" + name + "'");
}

ExperimentOutput run_comparison(const ExperimentConfig& config, const RunOptions& options) {
  const ExperimentConfig cfg = resolve_config(config, Experiment::compare);
  const LdsParams& sys = cfg.system;
  const SteadyState ss = steady_state(sys);
  const int max_depth = *std::max_element(cfg.depths.begin(), cfg.depths.end());
  const int t0 = std::max({1, max_depth + 1, cfg.ogd_s});
  const int T = cfg.T;
  const double bound = cfg.clip_bound ? resolve_clip(*cfg.clip_bound, sys) : 0.0;

  std::vector<std::string> names{"kalman_oracle"};
  std::vector<ArModel> models;
  for (int s : cfg.depths) {
    names.push_back("ar_truncated_s" + std::to_string(s));
    models.push_back(ar_coefficients(ss, sys, s));
  }
  for (auto k : {PredictorKind::persistence, PredictorKind::ogd, PredictorKind::best_fixed}) {
    names.emplace_back(to_string(k));
  }
  const std::size_t P = names.size();
  const std::size_t burn =
      static_cast<std::size_t>(std::max(0, cfg.burn_in.value_or(static_cast<int>(
                                               default_scoring_burn_in(max_depth))) -
                                               t0));

  std::vector<CompareRun> runs(static_cast<std::size_t>(cfg.runs));
  for_each_index(runs.size(), options, [&](std::size_t r) {
    Trajectory traj = simulate(sys, T, cfg.seed + r);
    std::vector<double>& y = traj.observations;
    if (cfg.clip_bound) clip(y, bound);
    const FilterRun filt = run_filter(sys, y);
    std::vector<double> ogd_pred;
    ogd_losses(y, cfg.ogd_s, cfg.D, cfg.c, &ogd_pred);
    const BestFixed bf = best_fixed_theta(y, cfg.ogd_s, cfg.D);
    const std::span<const double> ys(y);

    std::vector<std::vector<double>> preds(P);
    for (int t = t0; t <= T; ++t) {
      const auto hist = ys.first(static_cast<std::size_t>(t));
      std::size_t p = 0;
      preds[p++].push_back(filt.forecasts[t - 1]);
      for (const auto& m : models) preds[p++].push_back(ar_predict(m, hist));
      preds[p++].push_back(persistence_predict(hist));
      preds[p++].push_back(ogd_pred[t - cfg.ogd_s]);
      double fixed = 0.0;
      for (int i = 0; i < cfg.ogd_s; ++i) fixed += bf.theta(i) * y[t - 1 - i];
      preds[p++].push_back(fixed);
    }
    const auto truths = ys.subspan(static_cast<std::size_t>(t0));
    CompareRun& out = runs[r];
    for (std::size_t p = 0; p < P; ++p) {
      std::vector<double> sq(truths.size());
      for (std::size_t i = 0; i < truths.size(); ++i) {
        sq[i] = (preds[p][i] - truths[i]) * (preds[p][i] - truths[i]);
      }
      out.sq.push_back(std::move(sq));
      out.rmse.push_back(score(preds[p], truths, burn).rmse);
    }
  });

  ExperimentOutput out = make_output(Experiment::compare, cfg);
  Table table;
  table.columns.push_back("t");
  for (const auto& n : names) {
    table.columns.push_back("mean_" + n);
    table.columns.push_back("std_" + n);
  }
  std::vector<double> col(runs.size());
  for (int t = t0; t <= T; ++t) {
    std::vector<Cell> row{std::int64_t{t}};
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t r = 0; r < runs.size(); ++r) col[r] = runs[r].sq[p][t - t0];
      const MeanStd ms = mean_std(col);
      row.emplace_back(ms.mean);
      row.emplace_back(ms.std);
    }
    table.add_row(std::move(row));
  }
  out.artifacts.push_back({cfg.name, std::move(table), {{"t0", t0}}});

  nlohmann::json predictors = nlohmann::json::object();
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t r = 0; r < runs.size(); ++r) col[r] = runs[r].rmse[p];
    const MeanStd ms = mean_std(col);
    predictors[names[p]] = {{"mean_rmse", ms.mean},
                            {"std_rmse", ms.std},
                            {"se_rmse", ms.std / std::sqrt(static_cast<double>(runs.size()))},
                            {"per_run_rmse", col}};
  }
  out.summary["predictors"] = predictors;
  out.summary["steady_state"] = to_json(ss);
  out.summary["scoring_burn_in"] = t0 + static_cast<int>(burn);

  // Run 0 diagnostics for the first depth.
  Trajectory traj = simulate(sys, T, cfg.seed);
  if (cfg.clip_bound) clip(traj.observations, bound);
  Table traj_table;
  traj_table.columns = {"t", "y"};
  for (Eigen::Index i = 0; i < sys.dim(); ++i) traj_table.columns.push_back("phi_" + std::to_string(i));
  for (std::size_t t = 0; t < traj.length(); ++t) {
    std::vector<Cell> row{static_cast<std::int64_t>(t), traj.observations[t]};
    for (Eigen::Index i = 0; i < sys.dim(); ++i) row.emplace_back(traj.states[t](i));
    traj_table.add_row(std::move(row));
  }
  const nlohmann::json diag_meta{{"params", to_json(sys)}, {"seed", cfg.seed}};
  out.artifacts.push_back({cfg.name + ".trajectory", std::move(traj_table), diag_meta});

  const int s = cfg.depths.front();
  const int gap_burn = cfg.burn_in.value_or(default_burn_in(ss.iters, T));
  const auto gap = truncation_gap(sys, traj.observations, models.front(), gap_burn);
  nlohmann::json gap_meta = diag_meta;
  gap_meta["s"] = s;
  gap_meta["burn_in"] = gap_burn;
  const GapSummary gs = summarize_gap(gap);
  gap_meta["max"] = gs.max;
  gap_meta["p95"] = gs.p95;
  out.artifacts.push_back({cfg.name + ".gap", series_table(gap), gap_meta});

  const auto rem = remainder_series(sys, traj.observations, s);
  nlohmann::json rem_meta = diag_meta;
  rem_meta["s"] = s;
  rem_meta["burn_in"] = 0;
  out.artifacts.push_back({cfg.name + ".remainder", series_table(rem.values), rem_meta});
  return out;
}

// ---- noise sweep ----------------------------------------------------------

ExperimentOutput noise_sweep(const ExperimentConfig& config, const RunOptions& options) {
  const ExperimentConfig cfg = resolve_config(config, Experiment::noise_sweep);
  const int s = cfg.depths.front();
  const auto& wg = cfg.noise_sweep.w_grid;
  const auto& vg = cfg.noise_sweep.v_grid;
  const std::size_t cells = wg.size() * vg.size();
  const auto R = static_cast<std::size_t>(cfg.runs);

  std::vector<LdsParams> systems;
  std::vector<ArModel> models;
  for (double w : wg) {
    for (double v : vg) {
      systems.push_back(with_noise(cfg.system, w, v));
      models.push_back(ar_coefficients(steady_state(systems.back()), systems.back(), s));
    }
  }

  struct Item {
    double loss_kf = 0.0, loss_ar = 0.0, rmse_kf = 0.0, rmse_ar = 0.0;
  };
  std::vector<Item> items(cells * R);
  for_each_index(items.size(), options, [&](std::size_t k) {
    const std::size_t cell = k / R;
    const LdsParams& sys = systems[cell];
    const Trajectory traj = simulate(sys, cfg.T, cfg.seed + k);
    const std::span<const double> y(traj.observations);
    const FilterRun filt = run_filter(sys, y);
    Item& it = items[k];
    int count = 0;
    for (int t = s + 1; t <= cfg.T; ++t) {
      const double ekf = filt.forecasts[t - 1] - y[t];
      const double ear = ar_predict(models[cell], y.first(static_cast<std::size_t>(t))) - y[t];
      it.loss_kf += ekf * ekf;
      it.loss_ar += ear * ear;
      ++count;
    }
    it.rmse_kf = std::sqrt(it.loss_kf / count);
    it.rmse_ar = std::sqrt(it.loss_ar / count);
  });

  ExperimentOutput out = make_output(Experiment::noise_sweep, cfg);
  Table table{{"w", "v", "rmse_ar", "rmse_kf", "ratio"}, {}};
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double lkf = 0.0, lar = 0.0, rkf = 0.0, rar = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const Item& it = items[cell * R + r];
      lkf += it.loss_kf;
      lar += it.loss_ar;
      rkf += it.rmse_kf;
      rar += it.rmse_ar;
    }
    table.add_row({wg[cell / vg.size()], vg[cell % vg.size()], rar / R, rkf / R,
                   lar > 0.0 ? lkf / lar : std::numeric_limits<double>::quiet_NaN()});
  }
  out.summary["s"] = s;
  out.summary["cells"] = cells;
  out.artifacts.push_back({cfg.name, std::move(table), {{"s", s}}});
  return out;
}

// ---- depth sweep ----------------------------------------------------------

ExperimentOutput depth_sweep(const ExperimentConfig& config, const RunOptions& options) {
  const ExperimentConfig cfg = resolve_config(config, Experiment::depth_sweep);
  const auto& depths = cfg.depths;
  const auto& settings = cfg.depth_sweep.settings;
  if (settings.empty()) throw ConfigError("depth_sweep.settings must be nonempty");
  const int max_depth = *std::max_element(depths.begin(), depths.end());
  const int rem_t = cfg.depth_sweep.remainder_t > 0 ? cfg.depth_sweep.remainder_t : cfg.T / 2;
  if (rem_t <= max_depth || rem_t > cfg.T) {
    throw ConfigError("depth_sweep.remainder_t must lie in (max(depths), T]");
  }
  const int t_start = std::max(max_depth + 1, cfg.burn_in.value_or(0));
  if (t_start > cfg.T) throw ConfigError("burn_in leaves no scored points");
  const std::size_t D = depths.size();
  const auto R = static_cast<std::size_t>(cfg.runs);

  std::vector<LdsParams> systems;
  std::vector<SteadyState> steady;
  std::vector<std::vector<ArModel>> models;
  for (const auto& st : settings) {
    systems.push_back(with_noise(cfg.system, st.w, st.v));
    steady.push_back(steady_state(systems.back()));
    models.emplace_back();
    for (int s : depths) models.back().push_back(ar_coefficients(steady.back(), systems.back(), s));
  }

  struct Item {
    std::vector<double> rmse;       // per depth
    std::vector<double> remainder;  // |remainder| per depth
    double slope = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<Item> items(settings.size() * R);
  for_each_index(items.size(), options, [&](std::size_t k) {
    const std::size_t set = k / R;
    const LdsParams& sys = systems[set];
    const Trajectory traj = simulate(sys, cfg.T, cfg.seed + k);
    const std::span<const double> y(traj.observations);
    const FilterRun filt = run_filter(sys, y);
    Item& it = items[k];
    std::vector<double> xs, logs;
    for (std::size_t d = 0; d < D; ++d) {
      double loss = 0.0;
      for (int t = t_start; t <= cfg.T; ++t) {
        const double e = ar_predict(models[set][d], y.first(static_cast<std::size_t>(t))) - y[t];
        loss += e * e;
      }
      it.rmse.push_back(std::sqrt(loss / (cfg.T - t_start + 1)));
      const double rem = std::abs(remainder_at(filt, sys, rem_t, depths[d]));
      it.remainder.push_back(rem);
      if (depths[d] >= 1 && rem > 0.0) {
        xs.push_back(depths[d]);
        logs.push_back(std::log(rem));
      }
    }
    if (xs.size() >= 2) it.slope = fitted_slope(xs, logs);
  });

  ExperimentOutput out = make_output(Experiment::depth_sweep, cfg);
  Table rmse_table{{"s", "W_tag", "v", "mean_rmse", "std_rmse"}, {}};
  Table rem_table{{"s", "W_tag", "v", "median_abs_remainder"}, {}};
  nlohmann::json per_setting = nlohmann::json::array();
  std::vector<double> col(R);
  for (std::size_t set = 0; set < settings.size(); ++set) {
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t r = 0; r < R; ++r) col[r] = items[set * R + r].rmse[d];
      const MeanStd ms = mean_std(col);
      rmse_table.add_row({std::int64_t{depths[d]}, settings[set].tag, settings[set].v, ms.mean, ms.std});
      for (std::size_t r = 0; r < R; ++r) col[r] = items[set * R + r].remainder[d];
      rem_table.add_row({std::int64_t{depths[d]}, settings[set].tag, settings[set].v, median(col)});
    }
    std::vector<double> slopes;
    for (std::size_t r = 0; r < R; ++r) {
      if (std::isfinite(items[set * R + r].slope)) slopes.push_back(items[set * R + r].slope);
    }
    per_setting.push_back({{"tag", settings[set].tag},
                           {"w", settings[set].w},
                           {"v", settings[set].v},
                           {"gamma", number_or_null(steady[set].gamma)},
                           {"kappa", number_or_null(steady[set].kappa)},
                           {"median_slope", finite_or_null(median(slopes))},
                           {"slope_samples", slopes.size()}});
  }
  out.summary["settings"] = per_setting;
  out.summary["remainder_t"] = rem_t;
  out.summary["scored_from"] = t_start;
  out.artifacts.push_back({cfg.name, std::move(rmse_table), {{"scored_from", t_start}}});
  out.artifacts.push_back({cfg.name + ".remainder", std::move(rem_table), {{"remainder_t", rem_t}}});
  return out;
}

// ---- counterexample -------------------------------------------------------

namespace {

struct CounterexampleCase {
  std::string name;
  LdsParams truth;
  LdsParams filter;
};

nlohmann::json counterexample_case(const CounterexampleCase& cs, const ExperimentConfig& cfg,
                                   const RunOptions& options, Table& table) {
  const int s = cfg.counterexample.s;
  const int T = cfg.T;
  const auto R = static_cast<std::size_t>(cfg.runs);
  std::vector<std::vector<double>> rems(R);
  std::vector<double> cov;  // R_t is observation independent; taken from run 0
  for_each_index(R, options, [&](std::size_t r) {
    const Trajectory traj = simulate(cs.truth, T, cfg.seed + r);
    const FilterRun filt = run_filter(cs.filter, traj.observations);
    for (int t = s + 1; t <= T; ++t) rems[r].push_back(remainder_at(filt, cs.filter, t, s));
    if (r == 0) {
      for (int t = s + 1; t <= T; ++t) cov.push_back(filt.states[t].R.trace());
    }
  });

  table.columns = {"t", "R_t", "tR_t", "remainder"};
  std::vector<double> mean_rem, tR;
  for (int t = s + 1; t <= T; ++t) {
    const auto i = static_cast<std::size_t>(t - s - 1);
    double m = 0.0;
    for (std::size_t r = 0; r < R; ++r) m += rems[r][i];
    m /= static_cast<double>(R);
    mean_rem.push_back(m);
    tR.push_back(t * cov[i]);
    table.add_row({std::int64_t{t}, cov[i], tR.back(), m});
  }

  const std::size_t n = mean_rem.size();
  const std::size_t quarter = std::max<std::size_t>(1, n / 4);
  auto mean_abs = [&](std::size_t from, std::size_t to) {
    double acc = 0.0;
    for (std::size_t i = from; i < to; ++i) acc += std::abs(mean_rem[i]);
    return acc / static_cast<double>(to - from);
  };
  double last_mean = 0.0;
  for (std::size_t i = n - quarter; i < n; ++i) last_mean += mean_rem[i];
  last_mean /= static_cast<double>(quarter);
  const double tr_start = tR[n - quarter];
  const double tr_end = tR.back();
  return {{"case", cs.name},
          {"s", s},
          {"tR_last", tr_end},
          {"tR_drift_last_quarter", std::abs(tr_end - tr_start) / std::abs(tr_end)},
          {"remainder_mean_last_quarter", last_mean},
          {"abs_remainder_first_quarter", mean_abs(0, quarter)},
          {"abs_remainder_last_quarter", mean_abs(n - quarter, n)}};
}

}  // namespace

ExperimentOutput counterexample_run(const ExperimentConfig& config, const RunOptions& options) {
  const ExperimentConfig cfg = resolve_config(config, Experiment::counterexample);
  const auto& ce = cfg.counterexample;

  CounterexampleCase scalar;
  scalar.name = "scalar";
  scalar.truth = {Matrix::Ones(1, 1), Vector::Ones(1), ce.v, Matrix::Zero(1, 1),
                  Vector::Constant(1, ce.m0_true), Matrix::Zero(1, 1)};
  scalar.filter = scalar.truth;
  scalar.filter.m0 = Vector::Zero(1);
  scalar.filter.C0 = Matrix::Ones(1, 1);

  CounterexampleCase rotation;
  rotation.name = "rotation";
  const double a = ce.rotation_angle;
  Matrix G(2, 2);
  G << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  rotation.truth = {G, Vector::Unit(2, 0), ce.v, Matrix::Zero(2, 2),
                    ce.m0_true * Vector::Unit(2, 0), Matrix::Zero(2, 2)};
  rotation.filter = rotation.truth;
  rotation.filter.m0 = Vector::Zero(2);
  rotation.filter.C0 = Matrix::Identity(2, 2);

  ExperimentOutput out = make_output(Experiment::counterexample, cfg);
  for (const auto& cs : {scalar, rotation}) {
    Table table;
    nlohmann::json summary = counterexample_case(cs, cfg, options, table);
    nlohmann::json meta{{"params", to_json(cs.filter)}, {"truth", to_json(cs.truth)}};
    out.summary[cs.name] = summary;
    out.artifacts.push_back({cfg.name + "." + cs.name, std::move(table), meta});
  }
  return out;
}

// ---- regret ---------------------------------------------------------------

ExperimentOutput regret_eval(const ExperimentConfig& config, const RunOptions& options) {
  const ExperimentConfig cfg = resolve_config(config, Experiment::regret);
  const auto& rg = cfg.regret;
  const int s = cfg.ogd_s;
  const double B0 = resolve_clip(*cfg.clip_bound, cfg.system);
  const int max_T = std::max(0, rg.checkpoints.empty()
                                    ? 0
                                    : *std::max_element(rg.checkpoints.begin(), rg.checkpoints.end()));
  const int N = max_T + s;  // observations Y_0..Y_{N-1}

  std::vector<double> y;
  if (rg.stream == "realizable") {
    y = simulate(cfg.system, N - 1, cfg.seed).observations;
  } else {
    const int half = rg.square_period / 2;
    for (int t = 0; t < N; ++t) y.push_back(((t / half) % 2 == 0) ? B0 : -B0);
  }
  clip(y, B0);
  const std::span<const double> ys(y);

  std::vector<double> ogd_pred;
  const std::vector<double> losses = ogd_losses(ys, s, cfg.D, cfg.c, &ogd_pred);

  // Kalman family: per-step losses on the same window t = s..N-1.
  const std::size_t F = rg.family.size();
  std::vector<std::vector<double>> fam_pred(F), fam_loss(F);
  std::vector<int> checkpoints;
  for (int T : rg.checkpoints) {
    if (T > 0) checkpoints.push_back(T);
  }
  std::vector<double> best_fixed(checkpoints.size());
  for_each_index(F + checkpoints.size(), options, [&](std::size_t k) {
    if (k < F) {
      const FilterRun filt = run_filter(rg.family[k], ys);
      for (int t = s; t < N; ++t) {
        const double e = filt.forecasts[t - 1] - y[t];
        fam_pred[k].push_back(filt.forecasts[t - 1]);
        fam_loss[k].push_back(e * e);
      }
    } else {
      const int T = checkpoints[k - F];
      best_fixed[k - F] = best_fixed_theta(ys.first(static_cast<std::size_t>(T + s)), s, cfg.D).loss;
    }
  });

  ExperimentOutput out = make_output(Experiment::regret, cfg);
  Table table{{"T", "cumloss_ogd", "cumloss_best_fixed", "cumloss_kalman_best", "normalized_regret"},
              {}};
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const int T = checkpoints[i];
    const double ogd = std::accumulate(losses.begin(), losses.begin() + T, 0.0);
    double kal = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < F; ++k) {
      kal = std::min(kal, std::accumulate(fam_loss[k].begin(), fam_loss[k].begin() + T, 0.0));
    }
    const double best = std::min(best_fixed[i], kal);
    table.add_row({std::int64_t{T}, ogd, best_fixed[i], F ? kal : std::numeric_limits<double>::quiet_NaN(),
                   (ogd - best) / std::sqrt(static_cast<double>(T))});
  }
  const double bound = 2.0 * (cfg.D * cfg.D + B0 * B0);
  out.summary["B0"] = B0;
  out.summary["D"] = cfg.D;
  out.summary["bound_2_D2_B02"] = bound;
  out.summary["stream"] = rg.stream;
  out.summary["family_size"] = F;
  out.artifacts.push_back({cfg.name, std::move(table), {{"B0", B0}, {"stream", rg.stream}}});

  std::vector<std::string> names;
  for (std::size_t k = 0; k < F; ++k) names.push_back("kalman_" + std::to_string(k));
  RegretLedger ledger(names);
  for (int t = s; t < N; ++t) {
    const auto i = static_cast<std::size_t>(t - s);
    std::vector<double> comps;
    for (std::size_t k = 0; k < F; ++k) comps.push_back(fam_pred[k][i]);
    ledger.record(t, y[t], ogd_pred[i], std::move(comps));
  }
  out.artifacts.push_back({cfg.name + ".ledger", ledger.to_table(), {{"B0", B0}}});
  return out;
}

// ---- learning-rate study --------------------------------------------------

ExperimentOutput lr_study(const ExperimentConfig& config, const RunOptions& options) {
  const ExperimentConfig cfg = resolve_config(config, Experiment::lr_study);
  const auto& lr = cfg.lr_study;
  std::vector<double> y;
  std::string source;
  if (cfg.series) {
    y = ingest_series(*cfg.series);
    source = cfg.series->path;
  } else {
    Rng rng(cfg.seed);
    if (lr.synthetic == "stationary") {
      // AR(1), phi = 0.7, innovation sd 0.5, started at stationarity.
      double x = rng.normal() * 0.5 / std::sqrt(1.0 - 0.49);
      for (int t = 0; t < lr.length; ++t) {
        y.push_back(x);
        x = 0.7 * x + 0.5 * rng.normal();
      }
    } else {
      for (int t = 0; t < lr.length; ++t) y.push_back(0.1 + 0.002 * t + 0.02 * rng.normal());
    }
    source = lr.synthetic;
  }
  if (y.size() < static_cast<std::size_t>(cfg.ogd_s) + 1) {
    throw ConfigError("lr-study series shorter than ogd_s + 1");
  }

  std::vector<std::vector<double>> traces(lr.c_values.size());
  for_each_index(traces.size(), options, [&](std::size_t k) {
    traces[k] = ogd_losses(y, cfg.ogd_s, cfg.D, lr.c_values[k]);
  });

  ExperimentOutput out = make_output(Experiment::lr_study, cfg);
  Table table{{"c", "t", "loss"}, {}};
  nlohmann::json cum = nlohmann::json::array();
  double best = std::numeric_limits<double>::infinity();
  double best_c = 0.0;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    for (std::size_t i = 0; i < traces[k].size(); ++i) {
      table.add_row({lr.c_values[k], static_cast<std::int64_t>(i) + cfg.ogd_s, traces[k][i]});
    }
    const double total = std::accumulate(traces[k].begin(), traces[k].end(), 0.0);
    cum.push_back({{"c", lr.c_values[k]}, {"cumloss", total}});
    if (total < best) {
      best = total;
      best_c = lr.c_values[k];
    }
  }
  out.summary["cumloss"] = cum;
  out.summary["best_c"] = best_c;
  out.summary["source"] = source;
  out.artifacts.push_back({cfg.name, std::move(table), {{"source", source}}});
  return out;
}

// ---- ingest ---------------------------------------------------------------

std::vector<double> difference(std::span<const double> series, int order) {
  if (order < 0 || order > 2) throw InvalidArgument("differencing must be 0, 1 or 2");
  std::vector<double> out(series.begin(), series.end());
  for (int k = 0; k < order; ++k) {
    if (out.empty()) break;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
    out.pop_back();
  }
  return out;
}

std::vector<double> ingest_series(const SeriesFile& file, SeriesStats* stats) {
  Table table;
  try {
    table = read_csv(std::filesystem::path(file.path));
  } catch (const InvalidArgument&) {
    throw;
  } catch (const std::exception& e) {
    throw InvalidArgument("cannot read series " + file.path + ": " + e.what());
  }
  std::size_t col = table.columns.size();
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i] == file.column) col = i;
  }
  if (col == table.columns.size()) {
    std::size_t pos = 0;
    std::size_t idx = 0;
    try {
      idx = std::stoul(file.column, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != file.column.size() || idx >= table.columns.size()) {
      throw InvalidArgument("series " + file.path + " has no column '" + file.column + "'");
    }
    col = idx;
  }
  std::vector<double> raw;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const double* x = col < row.size() ? std::get_if<double>(&row[col]) : nullptr;
    if (!x || !std::isfinite(*x)) {
      throw InvalidArgument(file.path + ":" + std::to_string(r + 2) + ": column '" +
                            table.columns[col] + "' is not a finite number");
    }
    raw.push_back(*x);
  }
  std::vector<double> out = difference(raw, file.differencing);
  if (out.size() < 3) {
    throw InvalidArgument("series " + file.path + " has fewer than 3 points after differencing");
  }
  if (stats) {
    const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
    *stats = {out.size(), *lo, *hi};
  }
  return out;
}

ExperimentOutput run_ingest(const ExperimentConfig& config, const RunOptions&) {
  const ExperimentConfig cfg = resolve_config(config, Experiment::ingest);
  SeriesStats stats;
  const std::vector<double> y = ingest_series(*cfg.series, &stats);
  if (y.size() < static_cast<std::size_t>(cfg.ogd_s) + 1) {
    throw ConfigError("ingested series shorter than ogd_s + 1");
  }
  ExperimentOutput out = make_output(Experiment::ingest, cfg);
  const nlohmann::json meta{{"length", stats.length},
                            {"min", stats.min},
                            {"max", stats.max},
                            {"differencing", cfg.series->differencing},
                            {"path", cfg.series->path}};

  Table series{{"t", "y"}, {}};
  for (std::size_t t = 0; t < y.size(); ++t) series.add_row({static_cast<std::int64_t>(t), y[t]});
  out.artifacts.push_back({cfg.name, std::move(series), meta});

  std::vector<double> pred;
  ogd_losses(y, cfg.ogd_s, cfg.D, cfg.c, &pred);
  RegretLedger ledger({"persistence"});
  for (std::size_t t = static_cast<std::size_t>(cfg.ogd_s); t < y.size(); ++t) {
    ledger.record(static_cast<std::int64_t>(t), y[t], pred[t - cfg.ogd_s], {y[t - 1]});
  }
  out.summary = meta;
  out.summary["cumloss_ogd"] = ledger.losses_alg();
  out.summary["cumloss_persistence"] = ledger.losses_comparator("persistence");
  out.artifacts.push_back({cfg.name + ".predictions", ledger.to_table(), meta});
  return out;
}

// ---- dispatch and output --------------------------------------------------

ExperimentOutput run_experiment(Experiment e, const ExperimentConfig& config,
                                const RunOptions& options) {
  switch (e) {
    case Experiment::compare: return run_comparison(config, options);
    case Experiment::noise_sweep: return noise_sweep(config, options);
    case Experiment::depth_sweep: return depth_sweep(config, options);
    case Experiment::counterexample: return counterexample_run(config, options);
    case Experiment::regret: return regret_eval(config, options);
    case Experiment::ingest: return run_ingest(config, options);
    case Experiment::lr_study: return lr_study(config, options);
  }
  throw InvalidArgument("unknown experiment");
}

std::vector<std::filesystem::path> write_outputs(const ExperimentOutput& output,
                                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string exp(experiment_name(output.experiment));
  const nlohmann::json config = to_json(output.config);
  std::vector<std::filesystem::path> written;
  auto write_json = [&](const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << j.dump(2) << '\n';
    written.push_back(path);
  };
  for (const auto& a : output.artifacts) {
    const auto csv = dir / (exp + "." + a.name + ".csv");
    write_csv(csv, a.table);
    written.push_back(csv);
    nlohmann::json manifest{{"experiment", exp},
                            {"artifact", a.name},
                            {"version", KFAR_VERSION},
                            {"csv", csv.filename().string()},
                            {"columns", a.table.columns},
                            {"rows", a.table.rows.size()},
                            {"meta", a.meta},
                            {"config", config}};
    write_json(dir / (exp + "." + a.name + ".manifest.json"), manifest);
  }
  write_json(dir / (exp + "." + output.config.name + ".summary.json"),
             {{"experiment", exp}, {"version", KFAR_VERSION}, {"summary", output.summary}});
  return written;
}

}  // namespace kfar
