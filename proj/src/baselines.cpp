#include "kfar/baselines.hpp"

#include <array>
#include <cmath>
#include <string>

#include "kfar/linalg.hpp"

namespace kfar {

namespace {

constexpr std::array<std::pair<PredictorKind, std::string_view>, 5> kNames{{
    {PredictorKind::persistence, "persistence"},
    {PredictorKind::kalman_oracle, "kalman_oracle"},
    {PredictorKind::ar_truncated, "ar_truncated"},
    {PredictorKind::ogd, "ogd"},
    {PredictorKind::best_fixed, "best_fixed"},
}};

}  // namespace

std::string_view to_string(PredictorKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

PredictorKind parse_predictor_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw InvalidArgument("unknown predictor '" + std::string(name) + "'");
}

double persistence_predict(std::span<const double> history) {
  if (history.empty()) throw InvalidArgument("persistence_predict: empty history");
  return history.back();
}

Score score(std::span<const double> predictions, std::span<const double> truths,
            std::size_t burn_in) {
  if (predictions.size() != truths.size()) {
    throw InvalidArgument("score: predictions and truths differ in length");
  }
  if (burn_in >= truths.size()) throw InvalidArgument("score: empty scoring window");
  Score out;
  for (std::size_t t = burn_in; t < truths.size(); ++t) {
    const double r = predictions[t] - truths[t];
    out.total_loss += r * r;
  }
  out.count = truths.size() - burn_in;
  out.rmse = std::sqrt(out.total_loss / static_cast<double>(out.count));
  return out;
}

}  // namespace kfar
