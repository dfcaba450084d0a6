#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kfar/linalg.hpp"
#include "kfar/table_io.hpp"

namespace kfar {

/// Online gradient descent over AR coefficients, restricted to the closed
/// Euclidean ball of radius D. The step counter t starts at s and the
/// learning rate is c / sqrt(t).
struct OgdState {
  int s = 1;
  double D = 1.0;
  double c = 1.0;
  Vector theta;
  std::int64_t t = 1;
};

OgdState ogd_init(int s, double D, double c, std::optional<Vector> theta0 = std::nullopt);

/// theta . (Y_{t-1}, ..., Y_{t-s}), taken from the tail of history
/// (ordered oldest to newest).
double ogd_predict(const OgdState& state, std::span<const double> history);

/// -2 (y - theta . lags) lags, with lags ordered most recent first.
Vector gradient(const Vector& theta, double y, const Vector& lags);

Vector project_ball(Vector theta, double D);

/// Arithmetic-operation counter used to show that a step costs O(s)
/// independent of t.
struct OpCounter {
  std::uint64_t flops = 0;
};

struct OgdStep {
  OgdState state;
  double loss = 0.0;
  double prediction = 0.0;
};

/// Predicts y from the last s values of history, scores (y - yhat)^2, then
/// theta <- project_ball(theta - c/sqrt(t) * gradient, D) and t <- t + 1.
OgdStep ogd_step(const OgdState& state, double y, std::span<const double> history,
                 OpCounter* ops = nullptr);

/// Best coefficient vector in hindsight: min sum_{t>=s} (Y_t - theta.lags_t)^2
/// over |theta| <= D.
struct BestFixed {
  Vector theta;
  double loss = 0.0;
  bool rank_deficient = false;
};

BestFixed best_fixed_theta(std::span<const double> observations, int s, double D);

/// Squared-error loss of a fixed theta over t >= s.
double fixed_theta_loss(std::span<const double> observations, const Vector& theta);

/// Running losses of the learner and any number of named comparators.
class RegretLedger {
 public:
  explicit RegretLedger(std::vector<std::string> comparators = {});

  struct Entry {
    std::int64_t t = 0;
    double y = 0.0;
    double yhat_alg = 0.0;
    std::vector<double> yhat_comparators;
  };

  void record(std::int64_t t, double y, double yhat_alg, std::vector<double> yhat_comparators);

  double losses_alg() const { return losses_alg_; }
  double losses_comparator(const std::string& name) const;
  const std::vector<std::string>& comparators() const { return names_; }
  const std::vector<Entry>& per_step() const { return entries_; }

  /// `t,y,yhat_ogd,loss_ogd,cumloss_ogd[,yhat_<name>,cumloss_<name>...]`
  Table to_table() const;

 private:
  std::vector<std::string> names_;
  double losses_alg_ = 0.0;
  std::vector<double> losses_comp_;
  std::vector<Entry> entries_;
};

}  // namespace kfar
