#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "kfar/ar_truncation.hpp"
#include "kfar/baselines.hpp"
#include "kfar/rng.hpp"

using namespace kfar;

TEST(Persistence, Examples) {
  std::vector<double> a{1, 2, 3};
  EXPECT_EQ(persistence_predict(a), 3.0);
  std::vector<double> b{5};
  EXPECT_EQ(persistence_predict(b), 5.0);
  std::vector<double> empty;
  EXPECT_THROW(persistence_predict(empty), InvalidArgument);
}

TEST(Persistence, ConstantSeriesHasZeroError) {
  std::vector<double> y(20, 1.25), pred;
  for (std::size_t t = 1; t < y.size(); ++t) {
    pred.push_back(persistence_predict(std::span<const double>(y).first(t)));
  }
  const auto sc = score(pred, std::span<const double>(y).subspan(1), 0);
  EXPECT_EQ(sc.total_loss, 0.0);
}

TEST(Persistence, EqualsUnitArModel) {
  Rng rng(4);
  std::vector<double> y;
  for (int i = 0; i < 50; ++i) y.push_back(rng.normal());
  for (int s = 0; s < 5; ++s) {
    ArModel m;
    m.s = s;
    m.theta = Vector::Zero(s + 1);
    m.theta(0) = 1.0;
    for (std::size_t t = s + 1; t <= y.size(); ++t) {
      const auto h = std::span<const double>(y).first(t);
      EXPECT_EQ(persistence_predict(h), ar_predict(m, h));
    }
  }
}

TEST(Score, Examples) {
  std::vector<double> a{1, 2, 3};
  const auto perfect = score(a, a, 0);
  EXPECT_EQ(perfect.rmse, 0.0);
  EXPECT_EQ(perfect.total_loss, 0.0);

  std::vector<double> zeros(4, 0.0), twos(4, 2.0);
  const auto s = score(zeros, twos, 0);
  EXPECT_EQ(s.total_loss, 16.0);
  EXPECT_EQ(s.rmse, 2.0);
  EXPECT_EQ(s.count, 4u);

  EXPECT_THROW(score(zeros, twos, 4), InvalidArgument);
  std::vector<double> three(3, 0.0);
  EXPECT_THROW(score(three, twos, 0), InvalidArgument);

  const auto burned = score(zeros, twos, 2);
  EXPECT_EQ(burned.total_loss, 8.0);
  EXPECT_EQ(burned.count, 2u);
}

TEST(Score, PairedPermutationInvariant) {
  Rng rng(9);
  std::vector<double> p, y;
  for (int i = 0; i < 100; ++i) p.push_back(rng.normal()), y.push_back(rng.normal());
  const double before = score(p, y, 0).total_loss;
  std::vector<std::size_t> idx(100);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  std::vector<double> p2, y2;
  for (auto i : idx) p2.push_back(p[i]), y2.push_back(y[i]);
  EXPECT_NEAR(score(p2, y2, 0).total_loss, before, 1e-12);
}

TEST(PredictorKind, NamesRoundTrip) {
  for (auto k : {PredictorKind::persistence, PredictorKind::kalman_oracle,
                 PredictorKind::ar_truncated, PredictorKind::ogd, PredictorKind::best_fixed}) {
    EXPECT_EQ(parse_predictor_kind(to_string(k)), k);
  }
  EXPECT_EQ(to_string(PredictorKind::kalman_oracle), "kalman_oracle");
  EXPECT_THROW(parse_predictor_kind("bogus"), InvalidArgument);
}

TEST(Score, DefaultBurnIn) {
  EXPECT_EQ(default_scoring_burn_in(2), 10u);
  EXPECT_EQ(default_scoring_burn_in(15), 15u);
}
