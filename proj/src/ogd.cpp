#include "kfar/ogd.hpp"

#include <algorithm>
#include <cmath>

namespace kfar {

OgdState ogd_init(int s, double D, double c, std::optional<Vector> theta0) {
  if (s < 1) throw InvalidArgument("ogd_init: s must be >= 1");
  if (!(D > 0.0)) throw InvalidArgument("ogd_init: D must be positive");
  if (!(c > 0.0)) throw InvalidArgument("ogd_init: c must be positive");
  OgdState state;
  state.s = s;
  state.D = D;
  state.c = c;
  state.t = s;
  if (theta0) {
    if (theta0->size() != s) throw InvalidArgument("ogd_init: theta0 must have length s");
    if (theta0->norm() > D) throw InvalidArgument("ogd_init: theta0 lies outside the ball");
    state.theta = *theta0;
  } else {
    state.theta = Vector::Zero(s);
  }
  return state;
}

double ogd_predict(const OgdState& state, std::span<const double> history) {
  if (history.size() < static_cast<std::size_t>(state.s)) {
    throw InvalidArgument("ogd_predict: history shorter than s");
  }
  const std::size_t last = history.size() - 1;
  double sum = 0.0;
  for (int i = 0; i < state.s; ++i) sum += state.theta(i) * history[last - i];
  return sum;
}

Vector gradient(const Vector& theta, double y, const Vector& lags) {
  if (theta.size() != lags.size()) throw InvalidArgument("gradient: size mismatch");
  return -2.0 * (y - theta.dot(lags)) * lags;
}

Vector project_ball(Vector theta, double D) {
  const double norm = theta.norm();
  if (norm > D) theta *= D / norm;
  return theta;
}

OgdStep ogd_step(const OgdState& state, double y, std::span<const double> history,
                 OpCounter* ops) {
  const int s = state.s;
  if (history.size() < static_cast<std::size_t>(s)) {
    throw InvalidArgument("ogd_step: history shorter than s");
  }
  const std::size_t last = history.size() - 1;
  OgdStep out;
  out.state = state;
  Vector& theta = out.state.theta;

  std::uint64_t flops = 0;
  double yhat = 0.0;
  for (int i = 0; i < s; ++i) {
    yhat += theta(i) * history[last - i];
    flops += 2;
  }
  const double residual = y - yhat;
  const double eta = state.c / std::sqrt(static_cast<double>(state.t));
  // theta - eta * (-2 r lags) = theta + (2 eta r) lags
  const double scale = 2.0 * eta * residual;
  flops += 5;
  double norm_sq = 0.0;
  for (int i = 0; i < s; ++i) {
    theta(i) += scale * history[last - i];
    norm_sq += theta(i) * theta(i);
    flops += 4;
  }
  const double norm = std::sqrt(norm_sq);
  const double shrink = norm > state.D ? state.D / norm : 1.0;
  flops += 2;
  for (int i = 0; i < s; ++i) {
    theta(i) *= shrink;
    flops += 1;
  }

  out.state.t = state.t + 1;
  out.prediction = yhat;
  out.loss = residual * residual;
  flops += 1;
  if (ops) ops->flops += flops;
  return out;
}

double fixed_theta_loss(std::span<const double> observations, const Vector& theta) {
  const auto s = static_cast<std::size_t>(theta.size());
  double loss = 0.0;
  for (std::size_t t = s; t < observations.size(); ++t) {
    double yhat = 0.0;
    for (std::size_t i = 0; i < s; ++i) yhat += theta(i) * observations[t - 1 - i];
    const double r = observations[t] - yhat;
    loss += r * r;
  }
  return loss;
}

BestFixed best_fixed_theta(std::span<const double> observations, int s, double D) {
  if (s < 1) throw InvalidArgument("best_fixed_theta: s must be >= 1");
  if (!(D > 0.0)) throw InvalidArgument("best_fixed_theta: D must be positive");
  if (observations.size() < static_cast<std::size_t>(s) + 1) {
    throw InvalidArgument("best_fixed_theta: need at least s+1 observations");
  }
  Matrix M = Matrix::Zero(s, s);
  Vector b = Vector::Zero(s);
  Vector lags(s);
  for (std::size_t t = s; t < observations.size(); ++t) {
    for (int i = 0; i < s; ++i) lags(i) = observations[t - 1 - i];
    M.selfadjointView<Eigen::Lower>().rankUpdate(lags);
    b += observations[t] * lags;
  }
  M = M.selfadjointView<Eigen::Lower>();

  BestFixed out;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  cod.setThreshold(1e-12);
  out.rank_deficient = cod.rank() < s;
  Vector theta = cod.solve(b);

  if (theta.norm() > D) {
    // |theta(lambda)| = |(M + lambda I)^{-1} b| decreases in lambda.
    auto solve = [&](double lambda) {
      Matrix shifted = M;
      shifted.diagonal().array() += lambda;
      return Vector(shifted.ldlt().solve(b));
    };
    double lo = 0.0;
    double hi = 1.0;
    while (solve(hi).norm() > D) hi *= 2.0;
    Vector at_hi = solve(hi);
    for (int iter = 0; iter < 500 && D - at_hi.norm() > 1e-10; ++iter) {
      const double mid = 0.5 * (lo + hi);
      Vector at_mid = solve(mid);
      if (at_mid.norm() > D) {
        lo = mid;
      } else {
        hi = mid;
        at_hi = std::move(at_mid);
      }
      if (hi - lo <= 1e-300) break;
    }
    theta = project_ball(at_hi, D);
  }
  out.theta = theta;
  out.loss = fixed_theta_loss(observations, theta);
  return out;
}

RegretLedger::RegretLedger(std::vector<std::string> comparators)
    : names_(std::move(comparators)), losses_comp_(names_.size(), 0.0) {}

void RegretLedger::record(std::int64_t t, double y, double yhat_alg,
                          std::vector<double> yhat_comparators) {
  if (yhat_comparators.size() != names_.size()) {
    throw InvalidArgument("RegretLedger::record: comparator count mismatch");
  }
  losses_alg_ += (y - yhat_alg) * (y - yhat_alg);
  for (std::size_t k = 0; k < names_.size(); ++k) {
    const double r = y - yhat_comparators[k];
    losses_comp_[k] += r * r;
  }
  entries_.push_back({t, y, yhat_alg, std::move(yhat_comparators)});
}

double RegretLedger::losses_comparator(const std::string& name) const {
  for (std::size_t k = 0; k < names_.size(); ++k) {
    if (names_[k] == name) return losses_comp_[k];
  }
  throw InvalidArgument("RegretLedger: unknown comparator '" + name + "'");
}

Table RegretLedger::to_table() const {
  Table table;
  table.columns = {"t", "y", "yhat_ogd", "loss_ogd", "cumloss_ogd"};
  for (const auto& name : names_) {
    table.columns.push_back("yhat_" + name);
    table.columns.push_back("cumloss_" + name);
  }
  double cum = 0.0;
  std::vector<double> cum_comp(names_.size(), 0.0);
  for (const auto& e : entries_) {
    const double loss = (e.y - e.yhat_alg) * (e.y - e.yhat_alg);
    cum += loss;
    std::vector<Cell> row{e.t, e.y, e.yhat_alg, loss, cum};
    for (std::size_t k = 0; k < names_.size(); ++k) {
      const double r = e.y - e.yhat_comparators[k];
      cum_comp[k] += r * r;
      row.emplace_back(e.yhat_comparators[k]);
      row.emplace_back(cum_comp[k]);
    }
    table.add_row(std::move(row));
  }
  return table;
}

}  // namespace kfar
