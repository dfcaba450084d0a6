#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "kfar/lds_model.hpp"

namespace kfar {

/// Filter quantities at time t. After kf_init only t, m and C are set; the
/// prediction fields (a, R, Q, A, f) are filled by kf_step.
struct KalmanState {
  int t = 0;
  Vector m;
  Matrix C;
  Vector a;
  Matrix R;
  double Q = 0.0;
  Vector A;
  double f = 0.0;
};

KalmanState kf_init(const LdsParams& params);

/// One predict/update cycle consuming Y_t:
///   a = G m, R = G C G' + W, Q = F'RF + v, f = F'a, A = RF/Q,
///   m <- a + A (y - f), C <- R - A Q A' (symmetrized).
/// Q == 0 can only occur with v == 0 and a degenerate prior; the gain is then
/// taken as zero (pseudo-inverse of Q).
KalmanState kf_step(const KalmanState& state, const LdsParams& params, double y);

/// One-step forecast f_{t+1} = F' G m_t.
double forecast(const KalmanState& state, const LdsParams& params);

/// The filter run over observations Y_0..Y_T. states[0] is the prior at t = 0;
/// Y_0 is not assimilated, states[t] for t >= 1 consumed Y_t.
/// forecasts[t] is f_{t+1} = F'G m_t, so forecasts[t-1] predicts Y_t.
struct FilterRun {
  std::vector<KalmanState> states;
  std::vector<double> forecasts;
};

FilterRun run_filter(const LdsParams& params, std::span<const double> observations);

/// Closed-loop matrix Z_t = G (I - A_t F').
Matrix closed_loop(const LdsParams& params, const Vector& gain);

struct RiccatiOptions {
  double tol = 1e-12;
  int max_iter = 100000;
};

/// Limits of the Riccati recursion and the contraction constants derived
/// from them. gamma and kappa are empty when R is numerically singular.
struct SteadyState {
  Matrix R;
  double Q = 0.0;
  Vector A;
  Matrix C;
  Matrix Z;
  std::optional<double> gamma;
  std::optional<double> kappa;
  int iters = 0;
  double residual = 0.0;
};

/// Right-hand side of the Riccati recursion,
///   G [R - (RF)(RF)' / (F'RF + v)] G' + W.
Matrix riccati_map(const LdsParams& params, const Matrix& R);

/// ||riccati_map(R) - R||_inf.
double riccati_defect(const LdsParams& params, const Matrix& R);

/// Iterates riccati_map from R_1 = G C0 G' + W to its fixed point.
/// Throws InvalidArgument for unobservable (G, F) and NumericalError when the
/// iteration has not converged after max_iter steps.
SteadyState steady_state(const LdsParams& params, RiccatiOptions options = {});

/// Whether R is too close to singular for the R-weighted norm to be used:
/// lambda_min(R) <= 1e-12 lambda_max(R), or R is below the resolution at
/// which the fixed-point iteration can distinguish it from zero.
bool is_numerically_singular(const Matrix& R, const LdsParams& params, double tol);

/// Max over `trials` random unit vectors x of [Z'x, Z'x] / [x, x] in the
/// R-weighted inner product. Never exceeds gamma (up to roundoff).
double contraction_check(const SteadyState& ss, int trials, std::uint64_t seed);

nlohmann::json to_json(const SteadyState& ss);

}  // namespace kfar
