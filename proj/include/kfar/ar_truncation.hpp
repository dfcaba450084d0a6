#pragma once

#include <memory>
#include <span>
#include <vector>

#include "kfar/kalman.hpp"

namespace kfar {

/// AR(s+1) truncation of the steady-state Kalman predictor:
///   theta_0 = <F, G A>,  theta_{j+1} = <F, Z^{j+1} G A>.
struct ArModel {
  int s = 0;
  Vector theta;
  std::shared_ptr<const SteadyState> source;
};

ArModel ar_coefficients(const SteadyState& ss, const LdsParams& params, int s);

/// Recomputes theta from the source steady state and reports the max abs
/// deviation; zero for a model built by ar_coefficients.
double coefficient_defect(const ArModel& model, const LdsParams& params);

/// sum_j theta_j Y_{t-j}, where Y_t is the last element of history
/// (ordered oldest to newest).
double ar_predict(const ArModel& model, std::span<const double> history);

struct SeriesPoint {
  int t = 0;
  double value = 0.0;
};

struct RemainderSeries {
  int s = 0;
  std::vector<SeriesPoint> values;
};

/// F' (Z_t Z_{t-1} ... Z_{t-s}) a_{t-s} from the exact time-varying filter, for
/// every t > s. Products are applied to F from the left one factor at a time.
RemainderSeries remainder_series(const LdsParams& params, std::span<const double> observations,
                                 int s);

/// Same, from an existing filter run (states[t] must carry a_t and A_t).
double remainder_at(const FilterRun& run, const LdsParams& params, int t, int s);

/// The unrolled forecast f_{t+1} split into its time-varying AR(s+1) part and
/// the remainder. coefficients[j] multiplies Y_{t-j}.
struct UnrolledForecast {
  double ar_part = 0.0;
  double remainder = 0.0;
  Vector coefficients;
};

UnrolledForecast unroll_forecast(const FilterRun& run, const LdsParams& params,
                                 std::span<const double> observations, int t, int s);

/// |f_{t+1} - ar_predict(model, Y_0..Y_t)| for t >= max(burn_in, s).
std::vector<SeriesPoint> truncation_gap(const LdsParams& params,
                                        std::span<const double> observations,
                                        const ArModel& model, int burn_in);

/// 10x the Riccati iteration count, capped at T/4.
int default_burn_in(int riccati_iters, int T);

struct GapSummary {
  double max = 0.0;
  double p95 = 0.0;
};

GapSummary summarize_gap(const std::vector<SeriesPoint>& gap);

}  // namespace kfar
