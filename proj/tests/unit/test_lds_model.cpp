#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "kfar/lds_model.hpp"
#include "kfar/rng.hpp"

using namespace kfar;

namespace {

LdsParams scalar_system(double g, double f, double v, double w, double m0, double c0) {
  return {Matrix::Constant(1, 1, g), Vector::Constant(1, f), v, Matrix::Constant(1, 1, w),
          Vector::Constant(1, m0), Matrix::Constant(1, 1, c0)};
}

std::string error_of(const LdsParams& p) {
  try {
    validate(p);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Validate, ScalarIdentityIsValid) {
  EXPECT_NO_THROW(validate(scalar_system(1, 1, 1, 1, 0, 1)));
}

TEST(Validate, ZeroObservationNoiseRejected) {
  EXPECT_NE(error_of(scalar_system(1, 1, 0, 1, 0, 1)).find("v must be positive"), std::string::npos);
  EXPECT_NO_THROW(validate_generator(scalar_system(1, 1, 0, 1, 0, 1)));
  EXPECT_THROW(validate_generator(scalar_system(1, 1, -1, 1, 0, 1)), InvalidArgument);
}

TEST(Validate, IndefiniteWNamed) {
  LdsParams p = example_system(0.5, 0.5);
  p.W = Vector{{1.0, -0.5}}.asDiagonal();
  const std::string msg = error_of(p);
  EXPECT_NE(msg.find("W"), std::string::npos);
  EXPECT_NE(msg.find("-0.5"), std::string::npos);
}

TEST(Validate, DimensionAndSymmetryErrors) {
  LdsParams p = example_system(0.5, 0.5);
  p.m0 = Vector::Zero(3);
  EXPECT_THROW(validate(p), InvalidArgument);
  p = example_system(0.5, 0.5);
  p.C0(0, 1) = 0.1;
  EXPECT_NE(error_of(p).find("C0"), std::string::npos);
  p = example_system(0.5, 0.5);
  p.G = Matrix::Identity(3, 3);
  EXPECT_THROW(validate(p), InvalidArgument);
}

TEST(Observability, Examples) {
  const auto ex = is_observable(Vector{{0.999, 0.5}}.asDiagonal(), Vector{{1.0, 1.0}});
  EXPECT_TRUE(ex.observable);
  EXPECT_EQ(ex.rank, 2);

  const auto id = is_observable(Matrix::Identity(2, 2), Vector{{1.0, 0.0}});
  EXPECT_FALSE(id.observable);
  EXPECT_EQ(id.rank, 1);

  Matrix rot{{0.0, -1.0}, {1.0, 0.0}};
  const auto r = is_observable(rot, Vector{{1.0, 0.0}});
  EXPECT_TRUE(r.observable);
  EXPECT_EQ(r.rank, 2);
}

TEST(Observability, InvariantUnderScalingF) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    Matrix G(n, n);
    Vector F(n);
    for (int i = 0; i < n; ++i) {
      F(i) = trial % 5 == 0 && i > 0 ? 0.0 : rng.normal();
      for (int j = 0; j < n; ++j) G(i, j) = trial % 7 == 0 ? (i == j) * 1.0 : rng.normal();
    }
    const auto a = is_observable(G, F);
    const auto b = is_observable(G, 2.0 * F);
    EXPECT_EQ(a.observable, b.observable);
    EXPECT_EQ(a.rank, b.rank);
  }
}

TEST(Simulate, NoiselessConstant) {
  const auto traj = simulate(scalar_system(1, 1, 0, 0, 3, 0), 4, 11);
  ASSERT_EQ(traj.length(), 5u);
  for (double y : traj.observations) EXPECT_EQ(y, 3.0);
}

TEST(Simulate, NoiselessMatchesPowers) {
  Rng rng(3);
  for (int n = 1; n <= 4; ++n) {
    Matrix G(n, n);
    Vector F(n), m0(n);
    for (int i = 0; i < n; ++i) {
      F(i) = rng.normal();
      m0(i) = rng.normal();
      for (int j = 0; j < n; ++j) G(i, j) = rng.uniform(-0.5, 0.5);
    }
    const LdsParams p{G, F, 0.0, Matrix::Zero(n, n), m0, Matrix::Zero(n, n)};
    const auto traj = simulate(p, 100, 5);
    Vector x = m0;
    for (int t = 0; t <= 100; ++t) {
      EXPECT_NEAR(traj.observations[t], F.dot(x), 1e-10);
      x = G * x;
    }
  }
}

TEST(Simulate, ProcessNoiseVarianceMatchesW) {
  const LdsParams p = example_system(0.5, 0.5);
  const auto traj = simulate(p, 500, 2024);
  // Recover omega_t = phi_t - G phi_{t-1} and compare sample variances with w.
  for (int comp = 0; comp < 2; ++comp) {
    double sum = 0.0, sumsq = 0.0;
    const int N = 500;
    for (int t = 1; t <= N; ++t) {
      const double w = (traj.states[t] - p.G * traj.states[t - 1])(comp);
      sum += w;
      sumsq += w * w;
    }
    const double mean = sum / N;
    const double var = (sumsq - N * mean * mean) / (N - 1);
    const double se = 0.5 * std::sqrt(2.0 / (N - 1));
    EXPECT_LT(std::abs(var - 0.5), 3.0 * se) << "component " << comp;
  }
}

TEST(Simulate, Deterministic) {
  const LdsParams p = example_system(0.5, 0.5);
  const auto a = simulate(p, 300, 99);
  const auto b = simulate(p, 300, 99);
  EXPECT_EQ(a.observations, b.observations);
  for (std::size_t t = 0; t < a.states.size(); ++t) EXPECT_EQ(a.states[t], b.states[t]);
  EXPECT_EQ(a.seed, 99u);
  const auto c = simulate(p, 300, 100);
  EXPECT_NE(a.observations, c.observations);
}

TEST(Simulate, RankDeficientCovarianceStaysInRange) {
  LdsParams p = example_system(0.5, 0.5);
  p.W = Matrix{{1.0, 1.0}, {1.0, 1.0}};  // noise only along (1,1)
  p.C0 = Matrix::Zero(2, 2);
  p.G = Matrix::Identity(2, 2);
  const auto traj = simulate(p, 50, 1);
  for (const auto& x : traj.states) EXPECT_NEAR(x(0), x(1), 1e-12);
}

TEST(Simulate, NegativeLengthRejected) {
  EXPECT_THROW(simulate(example_system(0.5, 0.5), -1, 1), InvalidArgument);
}

TEST(StationaryStd, ScalarClosedForm) {
  // S = W / (1 - g^2) = 4/3, output variance S + v.
  EXPECT_NEAR(stationary_output_std(scalar_system(0.5, 1, 1, 1, 0, 1)), std::sqrt(4.0 / 3.0 + 1.0),
              1e-12);
  EXPECT_THROW(stationary_output_std(scalar_system(1.0, 1, 1, 1, 0, 1)), InvalidArgument);
}

TEST(TrajectoryCsv, Headers) {
  const auto traj = simulate(example_system(0.5, 0.5), 2, 1);
  std::ostringstream a, b;
  write_trajectory_csv(a, traj, false);
  write_trajectory_csv(b, traj, true);
  EXPECT_EQ(a.str().substr(0, 4), "t,y\n");
  EXPECT_EQ(b.str().substr(0, 14), "t,y,phi_0,phi_");
  int lines = 0;
  for (char ch : a.str()) lines += ch == '\n';
  EXPECT_EQ(lines, 4);
}
