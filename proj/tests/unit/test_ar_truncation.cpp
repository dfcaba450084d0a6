#include <cmath>

#include <gtest/gtest.h>

#include "kfar/ar_truncation.hpp"
#include "random_systems.hpp"

using namespace kfar;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

LdsParams golden_system() {
  return {Matrix::Ones(1, 1), Vector::Ones(1), 1.0, Matrix::Ones(1, 1), Vector::Zero(1),
          Matrix::Ones(1, 1)};
}

}  // namespace

TEST(ArCoefficients, GoldenRatio) {
  const auto p = golden_system();
  const auto m = ar_coefficients(steady_state(p), p, 1);
  ASSERT_EQ(m.theta.size(), 2);
  EXPECT_NEAR(m.theta(0), 1.0 / kGolden, 1e-10);
  EXPECT_NEAR(m.theta(1), std::pow(kGolden, -3), 1e-10);
  EXPECT_NEAR(m.theta(0), 0.6180339887, 1e-10);
  EXPECT_NEAR(m.theta(1), 0.2360679775, 1e-10);
}

TEST(ArCoefficients, DepthZeroAndErrors) {
  const auto p = example_system(0.5, 0.5);
  const auto ss = steady_state(p);
  const auto m = ar_coefficients(ss, p, 0);
  ASSERT_EQ(m.theta.size(), 1);
  EXPECT_DOUBLE_EQ(m.theta(0), p.F.dot(p.G * ss.A));
  EXPECT_THROW(ar_coefficients(ss, p, -1), InvalidArgument);
}

TEST(ArCoefficients, MatchExplicitPowers) {
  for (int k = 0; k < 20; ++k) {
    const auto p = testing_support::random_system(k);
    const auto m = ar_coefficients(steady_state(p), p, 12);
    EXPECT_EQ(m.theta.size(), 13);
    EXPECT_LE(coefficient_defect(m, p), 1e-12 * std::max(1.0, m.theta.cwiseAbs().maxCoeff()));
  }
}

TEST(ArCoefficients, DecayAtHalfLogGamma) {
  for (int k = 0; k < 50; ++k) {
    const auto p = testing_support::random_system(900 + k);
    const auto ss = steady_state(p);
    const auto m = ar_coefficients(ss, p, 20);
    std::vector<double> xs, ys;
    for (int j = 1; j <= 20; ++j) {
      if (std::abs(m.theta(j)) > 1e-300) {
        xs.push_back(j);
        ys.push_back(std::log(std::abs(m.theta(j))));
      }
    }
    if (xs.size() < 2) continue;
    // Cauchy-Schwarz in the R-weighted inner product gives the explicit
    // constant c = |GA|_{R^-1} |F|_R.
    const double half = 0.5 * std::log(*ss.gamma);
    const Vector GA = p.G * ss.A;
    const double c = std::sqrt(GA.dot(ss.R.ldlt().solve(GA)) * p.F.dot(ss.R * p.F));
    for (int j = 1; j <= 20; ++j) {
      EXPECT_LE(std::abs(m.theta(j)), c * std::pow(*ss.gamma, 0.5 * j) * (1 + 1e-9) + 1e-300);
    }
    const double n = xs.size();
    double mx = 0, my = 0, sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    EXPECT_LE(sxy / sxx, half + 0.05) << "system " << k;
  }
}

TEST(ArPredict, Examples) {
  ArModel m;
  m.s = 0;
  m.theta = Vector::Ones(1);
  std::vector<double> h{1, 2, 7};
  EXPECT_EQ(ar_predict(m, h), 7.0);
  m.s = 1;
  m.theta = Vector{{0.5, 0.25}};
  std::vector<double> h2{9, 2, 4};
  EXPECT_DOUBLE_EQ(ar_predict(m, h2), 2.5);
  m.theta.setZero();
  EXPECT_EQ(ar_predict(m, h2), 0.0);
  std::vector<double> short_history{1};
  EXPECT_THROW(ar_predict(m, short_history), InvalidArgument);
}

TEST(Remainder, ZeroStateSystem) {
  const auto p = example_system(0.5, 0.5);
  std::vector<double> zeros(50, 0.0);
  const auto rs = remainder_series(p, zeros, 3);
  EXPECT_EQ(rs.s, 3);
  ASSERT_EQ(rs.values.size(), 50u - 4u);
  EXPECT_EQ(rs.values.front().t, 4);
  for (const auto& v : rs.values) EXPECT_EQ(v.value, 0.0);
  std::vector<double> tiny(4, 1.0);
  EXPECT_THROW(remainder_series(p, tiny, 3), InvalidArgument);
  EXPECT_THROW(remainder_series(p, zeros, -1), InvalidArgument);
}

TEST(Remainder, MatchesExplicitProduct) {
  const auto p = example_system(0.5, 0.5);
  const auto y = simulate(p, 60, 4).observations;
  const auto run = run_filter(p, y);
  for (int t = 10; t <= 60; t += 7) {
    Matrix prod = Matrix::Identity(2, 2);
    for (int i = 0; i <= 5; ++i) prod = prod * closed_loop(p, run.states[t - i].A);
    EXPECT_NEAR(remainder_at(run, p, t, 5), p.F.dot(prod * run.states[t - 5].a), 1e-12);
  }
}

TEST(Unroll, ExactDecomposition) {
  for (int k = 0; k < 10; ++k) {
    const auto p = k < 5 ? example_system(0.5, 0.5) : testing_support::random_system(k);
    const auto y = simulate(p, 120, k).observations;
    const auto run = run_filter(p, y);
    for (int s : {0, 1, 5}) {
      for (int t = s + 1; t <= 120; ++t) {
        const auto u = unroll_forecast(run, p, y, t, s);
        const double exact = run.forecasts[t];
        EXPECT_LE(std::abs(u.ar_part + u.remainder - exact), 1e-8 * std::max(1.0, std::abs(exact)));
      }
    }
  }
  const auto p = example_system(0.5, 0.5);
  const auto y = simulate(p, 10, 1).observations;
  const auto run = run_filter(p, y);
  EXPECT_THROW(unroll_forecast(run, p, y, 3, 3), InvalidArgument);
}

TEST(Unroll, CoefficientsConvergeToTheta) {
  const auto p = example_system(0.5, 0.5);
  const auto ss = steady_state(p);
  const int s = 6;
  const auto model = ar_coefficients(ss, p, s);
  const int t = 10 * ss.iters + s + 1;
  const auto y = simulate(p, t, 2).observations;
  const auto run = run_filter(p, y);
  const auto u = unroll_forecast(run, p, y, t, s);
  EXPECT_LE((u.coefficients - model.theta).norm(), 1e-6);
}

TEST(Remainder, LargerProcessNoiseDecaysFaster) {
  // Fitted decay slope of the steady-state theta (which drives the remainder)
  // and of the median remainder must steepen with W.
  auto median_slope = [](double w) {
    const auto p = example_system(w, 0.5);
    std::vector<double> slopes;
    for (int seed = 0; seed < 20; ++seed) {
      const auto y = simulate(p, 100, seed).observations;
      const auto run = run_filter(p, y);
      std::vector<double> xs, ls;
      for (int s = 1; s <= 12; ++s) {
        const double r = std::abs(remainder_at(run, p, 100, s));
        if (r > 0) xs.push_back(s), ls.push_back(std::log(r));
      }
      const double n = xs.size();
      double mx = 0, my = 0, sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ls[i] / n;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ls[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      slopes.push_back(sxy / sxx);
    }
    std::sort(slopes.begin(), slopes.end());
    return 0.5 * (slopes[9] + slopes[10]);
  };
  EXPECT_LT(median_slope(1.0), median_slope(0.1));
}

TEST(Gap, ZeroObservations) {
  const auto p = example_system(0.5, 0.5);
  const auto model = ar_coefficients(steady_state(p), p, 4);
  std::vector<double> zeros(80, 0.0);
  const auto gap = truncation_gap(p, zeros, model, 10);
  ASSERT_FALSE(gap.empty());
  EXPECT_EQ(gap.front().t, 10);
  for (const auto& g : gap) EXPECT_EQ(g.value, 0.0);
  const auto sum = summarize_gap(gap);
  EXPECT_EQ(sum.max, 0.0);
  EXPECT_EQ(sum.p95, 0.0);
}

TEST(Gap, SummaryStatistics) {
  std::vector<SeriesPoint> pts;
  for (int i = 1; i <= 100; ++i) pts.push_back({i, double(i)});
  const auto s = summarize_gap(pts);
  EXPECT_EQ(s.max, 100.0);
  EXPECT_GE(s.p95, 94.0);
  EXPECT_LE(s.p95, 96.0);
}

TEST(Gap, DefaultBurnIn) {
  EXPECT_EQ(default_burn_in(31, 500), 125);
  EXPECT_EQ(default_burn_in(5, 500), 50);
}
