#pragma once

#include "ouspec/core.hpp"

namespace ou::linalg {

/// Solves A X = rhs exactly by Gaussian elimination over the rationals.
/// Throws Error(singular_system) when A is singular.
RationalMatrix solve_exact(RationalMatrix a, RationalMatrix rhs);

/// Exact determinant by fraction-free elimination over the rationals.
Rational determinant_exact(RationalMatrix a);

/// Column-major vectorization helpers for the Kronecker form of B X + X B^T.
template <class T>
Matrix<T> lyapunov_operator(const Matrix<T>& b) {
  const Eigen::Index n = b.rows();
  Matrix<T> k = Matrix<T>::Zero(n * n, n * n);
  // vec(B X) = (I (x) B) vec(X), vec(X B^T) = (B (x) I) vec(X)
  for (Eigen::Index col = 0; col < n; ++col)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        k(col * n + i, col * n + j) += b(i, j);
        k(col * n + i, j * n + i) += b(col, j);
      }
  return k;
}

double max_abs(const Eigen::MatrixXd& m);
double max_abs(const Eigen::MatrixXcd& m);

}  // namespace ou::linalg
