#include "kfar/linalg.hpp"

#include <algorithm>

namespace kfar::linalg {

double max_abs(const Matrix& X) {
  return X.size() == 0 ? 0.0 : X.cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& X, double tol) {
  return X.rows() == X.cols() && max_abs(X - X.transpose()) <= tol;
}

double min_eigenvalue(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(X), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

Matrix psd_factor(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(X));
  Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

Matrix inverse_sqrt(const Matrix& R) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(R));
  Vector inv_root = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().transpose();
}

PencilBounds pencil_eigenvalues(const Matrix& X, const Matrix& R) {
  const Matrix W = inverse_sqrt(R);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(W * X * W), Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

}  // namespace kfar::linalg
