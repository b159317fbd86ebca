#include "ouspec/linalg.hpp"

namespace ou::linalg {

RationalMatrix solve_exact(RationalMatrix a, RationalMatrix rhs) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || rhs.rows() != n)
    throw Error(ErrorKind::dimension_mismatch, "solve_exact expects a square system");
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) throw Error(ErrorKind::singular_system, "zero pivot in column " + std::to_string(col));
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      rhs.row(pivot).swap(rhs.row(col));
    }
    const Rational inv = Rational(1) / a(col, col);
    for (Eigen::Index row = 0; row < n; ++row) {
      if (row == col || a(row, col) == 0) continue;
      const Rational factor = a(row, col) * inv;
      for (Eigen::Index k = col; k < n; ++k) a(row, k) -= factor * a(col, k);
      for (Eigen::Index k = 0; k < rhs.cols(); ++k) rhs(row, k) -= factor * rhs(col, k);
    }
  }
  for (Eigen::Index row = 0; row < n; ++row) {
    const Rational inv = Rational(1) / a(row, row);
    for (Eigen::Index k = 0; k < rhs.cols(); ++k) rhs(row, k) *= inv;
  }
  return rhs;
}

Rational determinant_exact(RationalMatrix a) {
  const Eigen::Index n = a.rows();
  Rational det = 1;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      det = -det;
    }
    det *= a(col, col);
    for (Eigen::Index row = col + 1; row < n; ++row) {
      if (a(row, col) == 0) continue;
      const Rational factor = a(row, col) / a(col, col);
      for (Eigen::Index k = col; k < n; ++k) a(row, k) -= factor * a(col, k);
    }
  }
  return det;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace ou::linalg
