#include "kfar/kalman.hpp"

#include <cmath>
#include <sstream>

#include "kfar/rng.hpp"

namespace kfar {

KalmanState kf_init(const LdsParams& params) {
  validate(params);
  KalmanState s;
  s.t = 0;
  s.m = params.m0;
  s.C = params.C0;
  return s;
}

KalmanState kf_step(const KalmanState& state, const LdsParams& params, double y) {
  KalmanState next;
  next.t = state.t + 1;
  next.a = params.G * state.m;
  next.R = params.G * state.C * params.G.transpose() + params.W;
  const Vector RF = next.R * params.F;
  next.Q = params.F.dot(RF) + params.v;
  next.f = params.F.dot(next.a);
  next.A = next.Q > 0.0 ? Vector(RF / next.Q) : Vector(Vector::Zero(RF.size()));
  next.m = next.a + next.A * (y - next.f);
  next.C = linalg::symmetrize(next.R - next.A * next.Q * next.A.transpose());
  return next;
}

double forecast(const KalmanState& state, const LdsParams& params) {
  return params.F.dot(params.G * state.m);
}

FilterRun run_filter(const LdsParams& params, std::span<const double> observations) {
  FilterRun run;
  if (observations.empty()) return run;
  run.states.reserve(observations.size());
  run.forecasts.reserve(observations.size());
  run.states.push_back(kf_init(params));
  run.forecasts.push_back(forecast(run.states.back(), params));
  for (std::size_t t = 1; t < observations.size(); ++t) {
    run.states.push_back(kf_step(run.states.back(), params, observations[t]));
    run.forecasts.push_back(forecast(run.states.back(), params));
  }
  return run;
}

Matrix closed_loop(const LdsParams& params, const Vector& gain) {
  const Eigen::Index n = params.dim();
  return params.G * (Matrix::Identity(n, n) - gain * params.F.transpose());
}

Matrix riccati_map(const LdsParams& params, const Matrix& R) {
  const Vector RF = R * params.F;
  const double denom = params.F.dot(RF) + params.v;
  const Matrix inner = denom > 0.0 ? Matrix(R - RF * RF.transpose() / denom) : R;
  return linalg::symmetrize(params.G * inner * params.G.transpose() + params.W);
}

double riccati_defect(const LdsParams& params, const Matrix& R) {
  return linalg::max_abs(riccati_map(params, R) - R);
}

bool is_numerically_singular(const Matrix& R, const LdsParams& params, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(linalg::symmetrize(R), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= 1e-12 * hi) return true;
  // With W = 0 the iterate decays like v/t, and the stopping rule
  // ||R_{k+1} - R_k|| <= tol halts it near sqrt(tol * v); anything at that
  // scale is indistinguishable from the zero limit.
  return hi <= 10.0 * std::sqrt(tol * params.v);
}

SteadyState steady_state(const LdsParams& params, RiccatiOptions options) {
  validate(params);
  if (!is_observable(params.G, params.F).observable) {
    throw InvalidArgument("steady_state requires an observable (G, F) pair");
  }
  if (!(options.tol > 0.0) || options.max_iter < 1) {
    throw InvalidArgument("steady_state: tol must be positive and max_iter >= 1");
  }

  Matrix R = linalg::symmetrize(params.G * params.C0 * params.G.transpose() + params.W);
  double change = 0.0;
  int iters = 0;
  bool converged = false;
  while (iters < options.max_iter) {
    Matrix next = riccati_map(params, R);
    change = linalg::max_abs(next - R);
    R = std::move(next);
    ++iters;
    if (change <= options.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "Riccati iteration did not converge after " << iters
        << " iterations (last change " << change << ")";
    throw NumericalError(msg.str());
  }

  SteadyState ss;
  ss.R = R;
  ss.iters = iters;
  ss.residual = riccati_defect(params, R);
  const Vector RF = R * params.F;
  ss.Q = params.F.dot(RF) + params.v;
  ss.A = RF / ss.Q;
  ss.C = linalg::symmetrize(R - ss.A * ss.Q * ss.A.transpose());
  ss.Z = closed_loop(params, ss.A);

  if (!is_numerically_singular(R, params, options.tol)) {
    ss.kappa = linalg::pencil_eigenvalues(params.W, R).min;
    // [Z'x, Z'x] = x' Z R Z' x, so the contraction factor is the top of the
    // pencil (Z R Z', R).
    ss.gamma = linalg::pencil_eigenvalues(ss.Z * R * ss.Z.transpose(), R).max;
  }
  return ss;
}

double contraction_check(const SteadyState& ss, int trials, std::uint64_t seed) {
  if (trials <= 0) throw InvalidArgument("contraction_check: no samples");
  if (!ss.gamma) {
    throw InvalidArgument("contraction_check: gamma is undefined (R numerically singular)");
  }
  const Eigen::Index n = ss.R.rows();
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.normal();
    x.normalize();
    const Vector y = ss.Z.transpose() * x;
    const double ratio = y.dot(ss.R * y) / x.dot(ss.R * x);
    worst = std::max(worst, ratio);
  }
  return worst;
}

namespace {

nlohmann::json matrix_json(const Matrix& X) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < X.cols(); ++j) row.push_back(X(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json optional_json(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const SteadyState& ss) {
  return {
      {"R", matrix_json(ss.R)},
      {"Q", ss.Q},
      {"A", std::vector<double>(ss.A.data(), ss.A.data() + ss.A.size())},
      {"C", matrix_json(ss.C)},
      {"Z", matrix_json(ss.Z)},
      {"gamma", optional_json(ss.gamma)},
      {"kappa", optional_json(ss.kappa)},
      {"iters", ss.iters},
      {"residual", ss.residual},
  };
}

}  // namespace kfar
