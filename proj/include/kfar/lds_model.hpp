#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kfar/linalg.hpp"

namespace kfar {

/// A scalar-output linear dynamical system with Gaussian noise,
///
///   phi_t = G phi_{t-1} + omega_t,   omega_t ~ N(0, W)
///   Y_t   = F' phi_t + nu_t,         nu_t    ~ N(0, v)
///
/// together with the prior phi_0 ~ N(m0, C0).
struct LdsParams {
  Matrix G;
  Vector F;
  double v = 1.0;
  Matrix W;
  Vector m0;
  Matrix C0;

  Eigen::Index dim() const { return F.size(); }
};

/// Hidden states and observations for t = 0..T.
struct Trajectory {
  std::vector<Vector> states;
  std::vector<double> observations;
  std::uint64_t seed = 0;

  std::size_t length() const { return observations.size(); }
};

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

/// Checks every LdsParams invariant and returns the params unchanged.
/// Throws InvalidArgument naming the offending field.
LdsParams validate(LdsParams params);

/// Same as validate but accepts v == 0, which is meaningful for simulation
/// (a noiseless observation channel) but not for filtering.
LdsParams validate_generator(LdsParams params);

struct Observability {
  bool observable = false;
  int rank = 0;
};

/// Rank of [F, G'F, ..., G'^{n-1}F] via singular values thresholded at
/// tol * sigma_max.
Observability is_observable(const Matrix& G, const Vector& F, double tol = 1e-10);

/// Draws phi_0 ~ N(m0, C0), then T steps of the system. Pure in
/// (params, T, seed).
Trajectory simulate(const LdsParams& params, int T, std::uint64_t seed);

/// G = diag(0.999, 0.5), F = (1, 1), W = w I, prior N(0, I).
LdsParams example_system(double w, double v);

/// The stationary output standard deviation sqrt(F' S F + v), where S solves
/// S = G S G' + W. Throws InvalidArgument when G is not strictly stable.
double stationary_output_std(const LdsParams& params);

/// CSV with header `t,y` or, when full, `t,y,phi_0..phi_{n-1}`.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, bool full);

}  // namespace kfar
