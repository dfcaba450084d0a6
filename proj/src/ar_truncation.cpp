#include "kfar/ar_truncation.hpp"

#include <algorithm>
#include <cmath>

namespace kfar {

ArModel ar_coefficients(const SteadyState& ss, const LdsParams& params, int s) {
  if (s < 0) throw InvalidArgument("ar_coefficients: s must be nonnegative");
  if (!ss.A.allFinite() || !ss.Z.allFinite()) {
    throw InvalidArgument("ar_coefficients: steady state has non-finite A or Z");
  }
  ArModel model;
  model.s = s;
  model.theta.resize(s + 1);
  Vector w = params.G * ss.A;
  model.theta(0) = params.F.dot(w);
  for (int j = 1; j <= s; ++j) {
    w = ss.Z * w;
    model.theta(j) = params.F.dot(w);
  }
  model.source = std::make_shared<const SteadyState>(ss);
  return model;
}

double coefficient_defect(const ArModel& model, const LdsParams& params) {
  if (!model.source) throw InvalidArgument("coefficient_defect: model has no source");
  if (model.theta.size() != model.s + 1) return INFINITY;
  // Explicit powers here, independent of the repeated-product construction.
  const Vector GA = params.G * model.source->A;
  double worst = std::abs(model.theta(0) - params.F.dot(GA));
  Matrix power = Matrix::Identity(params.dim(), params.dim());
  for (int j = 1; j <= model.s; ++j) {
    power = power * model.source->Z;
    worst = std::max(worst, std::abs(model.theta(j) - params.F.dot(power * GA)));
  }
  return worst;
}

double ar_predict(const ArModel& model, std::span<const double> history) {
  const std::size_t order = static_cast<std::size_t>(model.s) + 1;
  if (history.size() < order) {
    throw InvalidArgument("ar_predict: history shorter than s+1");
  }
  double sum = 0.0;
  const std::size_t last = history.size() - 1;
  for (std::size_t j = 0; j < order; ++j) sum += model.theta(j) * history[last - j];
  return sum;
}

double remainder_at(const FilterRun& run, const LdsParams& params, int t, int s) {
  // u' = F' Z_t Z_{t-1} ... Z_{t-s}, i.e. u <- Z_{t-i}' u for i = 0..s.
  Vector u = params.F;
  for (int i = 0; i <= s; ++i) {
    u = closed_loop(params, run.states[t - i].A).transpose() * u;
  }
  return u.dot(run.states[t - s].a);
}

RemainderSeries remainder_series(const LdsParams& params, std::span<const double> observations,
                                 int s) {
  if (s < 0) throw InvalidArgument("remainder_series: s must be nonnegative");
  if (observations.size() <= static_cast<std::size_t>(s) + 1) {
    throw InvalidArgument("remainder_series: need more than s+1 observations");
  }
  const FilterRun run = run_filter(params, observations);
  RemainderSeries out;
  out.s = s;
  const int T = static_cast<int>(observations.size()) - 1;
  for (int t = s + 1; t <= T; ++t) out.values.push_back({t, remainder_at(run, params, t, s)});
  return out;
}

UnrolledForecast unroll_forecast(const FilterRun& run, const LdsParams& params,
                                 std::span<const double> observations, int t, int s) {
  if (t <= s || t >= static_cast<int>(run.states.size())) {
    throw InvalidArgument("unroll_forecast: need s < t <= T");
  }
  UnrolledForecast out;
  out.coefficients.resize(s + 1);
  // u' = F' (prod_{i=0}^{j} Z_{t-i}); coefficient of Y_{t-j-1} is u'G A_{t-j-1}.
  Vector u = params.F;
  out.coefficients(0) = u.dot(params.G * run.states[t].A);
  for (int j = 0; j < s; ++j) {
    u = closed_loop(params, run.states[t - j].A).transpose() * u;
    out.coefficients(j + 1) = u.dot(params.G * run.states[t - j - 1].A);
  }
  u = closed_loop(params, run.states[t - s].A).transpose() * u;
  out.remainder = u.dot(run.states[t - s].a);
  for (int j = 0; j <= s; ++j) out.ar_part += out.coefficients(j) * observations[t - j];
  return out;
}

std::vector<SeriesPoint> truncation_gap(const LdsParams& params,
                                        std::span<const double> observations,
                                        const ArModel& model, int burn_in) {
  if (observations.size() <= static_cast<std::size_t>(model.s) + 1) {
    throw InvalidArgument("truncation_gap: need more than s+1 observations");
  }
  const FilterRun run = run_filter(params, observations);
  std::vector<SeriesPoint> gap;
  const int T = static_cast<int>(observations.size()) - 1;
  for (int t = std::max(burn_in, model.s); t <= T; ++t) {
    const double ar = ar_predict(model, observations.first(t + 1));
    gap.push_back({t, std::abs(run.forecasts[t] - ar)});
  }
  return gap;
}

int default_burn_in(int riccati_iters, int T) { return std::min(10 * riccati_iters, T / 4); }

GapSummary summarize_gap(const std::vector<SeriesPoint>& gap) {
  if (gap.empty()) return {};
  std::vector<double> values;
  values.reserve(gap.size());
  for (const auto& p : gap) values.push_back(p.value);
  std::sort(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.95 * values.size())) - 1;
  return {values.back(), values[std::min(idx, values.size() - 1)]};
}

}  // namespace kfar
