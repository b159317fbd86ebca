#include "ouspec/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace ou {

namespace {

void check_covariance(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
    throw Error(ErrorKind::dimension_mismatch, "covariance must be a nonempty square matrix");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorKind::not_symmetric, "covariance is not symmetric");
}

}  // namespace

GaussianMeasure::GaussianMeasure(Eigen::MatrixXd covariance) : covariance_(std::move(covariance)) {
  check_covariance(covariance_);
  llt_.compute(covariance_);
  if (llt_.info() != Eigen::Success)
    throw Error(ErrorKind::not_positive_definite, "covariance is not positive definite");
}

GaussianMeasure::GaussianMeasure(const RationalMatrix& covariance)
    : GaussianMeasure(matrix_cast<double>(covariance)) {
  exact_ = covariance;
}

double GaussianMeasure::normalization() const {
  const double log_det = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return std::exp(-0.5 * dim() * std::log(2.0 * std::numbers::pi) - 0.5 * log_det);
}

double GaussianMeasure::density(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw Error(ErrorKind::dimension_mismatch, "density: wrong point dimension");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), dim());
  const double quad = v.dot(llt_.solve(v));
  return normalization() * std::exp(-0.5 * quad);
}

}  // namespace ou
