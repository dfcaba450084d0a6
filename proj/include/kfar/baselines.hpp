#pragma once

#include <span>
#include <string>
#include <string_view>

namespace kfar {

enum class PredictorKind { persistence, kalman_oracle, ar_truncated, ogd, best_fixed };

std::string_view to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(std::string_view name);

/// Last-value prediction.
double persistence_predict(std::span<const double> history);

struct Score {
  double rmse = 0.0;
  double total_loss = 0.0;
  std::size_t count = 0;
};

/// Squared error summed over indices >= burn_in.
Score score(std::span<const double> predictions, std::span<const double> truths,
            std::size_t burn_in);

/// Scoring warm-up: the first max(s, 10) points.
inline std::size_t default_scoring_burn_in(int s) {
  return static_cast<std::size_t>(s > 10 ? s : 10);
}

}  // namespace kfar
