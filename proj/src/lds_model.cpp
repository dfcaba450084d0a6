#include "kfar/lds_model.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "kfar/rng.hpp"
#include "kfar/table_io.hpp"

namespace kfar {

namespace {

void check_covariance(const Matrix& X, const char* name, Eigen::Index n) {
  if (X.rows() != n || X.cols() != n) {
    std::ostringstream msg;
    msg << name << " must be " << n << "x" << n << ", got " << X.rows() << "x" << X.cols();
    throw InvalidArgument(msg.str());
  }
  if (!linalg::is_symmetric(X, kSymmetryTol)) {
    throw InvalidArgument(std::string(name) + " is not symmetric");
  }
  const double lambda = linalg::min_eigenvalue(X);
  if (lambda < -kPsdTol) {
    std::ostringstream msg;
    msg << name << " is not positive semidefinite (min eigenvalue " << lambda << ")";
    throw InvalidArgument(msg.str());
  }
}

void check_common(const LdsParams& p) {
  const Eigen::Index n = p.F.size();
  if (n == 0) throw InvalidArgument("F must be nonempty");
  if (p.G.rows() != n || p.G.cols() != n) {
    throw InvalidArgument("G must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (p.m0.size() != n) throw InvalidArgument("m0 must have length " + std::to_string(n));
  if (!std::isfinite(p.v)) throw InvalidArgument("v must be finite");
  check_covariance(p.W, "W", n);
  check_covariance(p.C0, "C0", n);
}

}  // namespace

LdsParams validate(LdsParams params) {
  check_common(params);
  if (!(params.v > 0.0)) throw InvalidArgument("v must be positive");
  return params;
}

LdsParams validate_generator(LdsParams params) {
  check_common(params);
  if (params.v < 0.0) throw InvalidArgument("v must be nonnegative");
  return params;
}

Observability is_observable(const Matrix& G, const Vector& F, double tol) {
  const Eigen::Index n = F.size();
  if (n == 0 || G.rows() != n || G.cols() != n) {
    throw InvalidArgument("is_observable: dimension mismatch");
  }
  Matrix K(n, n);
  Vector col = F;
  for (Eigen::Index k = 0; k < n; ++k) {
    K.col(k) = col;
    col = G.transpose() * col;
  }
  Eigen::JacobiSVD<Matrix> svd(K);
  const Vector& sigma = svd.singularValues();
  const double threshold = tol * sigma(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > threshold) ++rank;
  }
  return {rank == n, rank};
}

Trajectory simulate(const LdsParams& params, int T, std::uint64_t seed) {
  validate_generator(params);
  if (T < 0) throw InvalidArgument("T must be nonnegative");
  const Eigen::Index n = params.dim();
  const Matrix prior_factor = linalg::psd_factor(params.C0);
  const Matrix noise_factor = linalg::psd_factor(params.W);
  const double obs_sd = std::sqrt(params.v);

  Rng rng(seed);
  auto draw = [&rng, n]() {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
    return z;
  };

  Trajectory out;
  out.seed = seed;
  out.states.reserve(T + 1);
  out.observations.reserve(T + 1);
  Vector phi = params.m0 + prior_factor * draw();
  for (int t = 0; t <= T; ++t) {
    if (t > 0) phi = params.G * phi + noise_factor * draw();
    out.states.push_back(phi);
    out.observations.push_back(params.F.dot(phi) + obs_sd * rng.normal());
  }
  return out;
}

LdsParams example_system(double w, double v) {
  LdsParams p;
  p.G = Vector{{0.999, 0.5}}.asDiagonal();
  p.F = Vector{{1.0, 1.0}};
  p.v = v;
  p.W = w * Matrix::Identity(2, 2);
  p.m0 = Vector::Zero(2);
  p.C0 = Matrix::Identity(2, 2);
  return p;
}

double stationary_output_std(const LdsParams& params) {
  const Eigen::Index n = params.dim();
  Eigen::ComplexEigenSolver<Matrix> eig(params.G, false);
  const double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0)) {
    throw InvalidArgument("stationary output std needs a stable G (spectral radius " +
                          format_number(radius) + ")");
  }
  // vec(S) = (I - G kron G)^{-1} vec(W)
  const Eigen::Index n2 = n * n;
  Matrix K(n2, n2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) = params.G(i, j) * params.G;
    }
  }
  const Matrix lhs = Matrix::Identity(n2, n2) - K;
  Vector vecW = Eigen::Map<const Vector>(params.W.data(), n2);
  Vector vecS = lhs.partialPivLu().solve(vecW);
  Matrix S = Eigen::Map<Matrix>(vecS.data(), n, n);
  return std::sqrt(params.F.dot(S * params.F) + params.v);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, bool full) {
  const Eigen::Index n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  out << "t,y";
  if (full) {
    for (Eigen::Index i = 0; i < n; ++i) out << ",phi_" << i;
  }
  out << '\n';
  for (std::size_t t = 0; t < trajectory.length(); ++t) {
    out << t << ',' << format_number(trajectory.observations[t]);
    if (full) {
      for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(trajectory.states[t](i));
    }
    out << '\n';
  }
}

}  // namespace kfar
