#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kfar {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised for malformed inputs: bad dimensions, violated preconditions,
/// invalid configuration. The CLI maps it to exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails (e.g. the Riccati iteration does
/// not converge). The CLI maps it to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace linalg {

/// Max-abs entry, i.e. ||X||_inf in the entrywise sense.
double max_abs(const Matrix& X);

bool is_symmetric(const Matrix& X, double tol);

/// Smallest eigenvalue of the symmetric part of X.
double min_eigenvalue(const Matrix& X);

/// Returns L with L L' = X for symmetric PSD X, via eigenfactorization.
/// Negative eigenvalues (roundoff, or rank deficiency) are clamped to zero,
/// so singular covariances are accepted.
Matrix psd_factor(const Matrix& X);

/// Largest and smallest generalized eigenvalues of the symmetric pencil
/// (X, R), computed as eigenvalues of R^{-1/2} X R^{-1/2}. R must be
/// positive definite; the caller checks that.
struct PencilBounds {
  double min;
  double max;
};
PencilBounds pencil_eigenvalues(const Matrix& X, const Matrix& R);

/// Inverse symmetric square root of a positive-definite matrix.
Matrix inverse_sqrt(const Matrix& R);

inline Matrix symmetrize(const Matrix& X) { return 0.5 * (X + X.transpose()); }

}  // namespace linalg
}  // namespace kfar
