#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "ouspec/core.hpp"

namespace ou {

enum class Backend { exact_rational, float64 };

inline constexpr double default_tol_hurwitz = 1e-10;
inline constexpr int max_supported_dim = 12;

/// Validated pair (Q, B): Q symmetric positive definite, B Hurwitz.
///
/// A model built from rational entries keeps them and reports the exact backend;
/// every model also carries the float64 view of both matrices.
class Model {
 public:
  static Model validate(const RationalMatrix& q, const RationalMatrix& b, double tol_hurwitz = default_tol_hurwitz);
  static Model validate(const Eigen::MatrixXd& q, const Eigen::MatrixXd& b, double tol_hurwitz = default_tol_hurwitz);

  int dim() const { return static_cast<int>(q_.rows()); }
  Backend backend() const { return exact_q_ ? Backend::exact_rational : Backend::float64; }
  bool has_exact() const { return exact_q_.has_value(); }

  const Eigen::MatrixXd& q() const { return q_; }
  const Eigen::MatrixXd& b() const { return b_; }
  const RationalMatrix& q_exact() const;
  const RationalMatrix& b_exact() const;

  /// Q and B in the requested scalar backend (Rational requires has_exact()).
  template <class T>
  Matrix<T> q_as() const {
    if constexpr (std::is_same_v<T, Rational>) return q_exact();
    else return matrix_cast<T>(q_);
  }
  template <class T>
  Matrix<T> b_as() const {
    if constexpr (std::is_same_v<T, Rational>) return b_exact();
    else return matrix_cast<T>(b_);
  }

  /// Drift eigenvalues, sorted by (real desc, imag desc).
  const std::vector<Complex>& drift_eigenvalues() const { return eigenvalues_; }

  /// Same model without its exact entries.
  Model as_float() const;

 private:
  Model() = default;
  static void check_shapes(Eigen::Index qr, Eigen::Index qc, Eigen::Index br, Eigen::Index bc);
  void finish(double tol_hurwitz);

  Eigen::MatrixXd q_, b_;
  std::optional<RationalMatrix> exact_q_, exact_b_;
  std::vector<Complex> eigenvalues_;
};

/// Eigenvalues of a real square matrix with multiplicity, sorted by (real desc, imag desc).
std::vector<Complex> eigenvalues_of(const Eigen::MatrixXd& m);

struct CovarianceMatrix {
  /// +infinity for the stationary covariance
  double t = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd sigma;
  std::optional<RationalMatrix> exact;
};

enum class ChangeKind { orthogonal, general_linear };

/// x~ = H x.
struct CoordinateChange {
  Eigen::MatrixXd h;
  Eigen::MatrixXd h_inv;
  ChangeKind kind = ChangeKind::general_linear;

  static CoordinateChange identity(int n);
  static CoordinateChange from(Eigen::MatrixXd h, ChangeKind kind);
};

/// e^{sM} by scaling and squaring with a degree-13 Pade approximant.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m, double s);

/// Q_infinity from B X + X B^T + Q = 0; exact when the model is.
CovarianceMatrix solve_lyapunov(const Model& model);

/// Q_t = Q_inf - e^{tB} Q_inf e^{tB^T}.
CovarianceMatrix covariance_at(const Model& model, double t);

/// The model in coordinates x~ = Hx: Q~ = H Q H^T, B~ = H B H^{-1}.
Model transform_model(const Model& model, const CoordinateChange& change);

struct Normalization {
  CoordinateChange change;
  Model model;
  /// Diagonal stationary covariance of the transformed model.
  Eigen::VectorXd stationary_diagonal;
};

/// Coordinates with Q~ = I and Q~_inf diagonal: H = H2 Q^{-1/2}, H2 orthogonal.
Normalization normalize_model(const Model& model);

/// True when Q = I and Q_inf is diagonal within `tol`.
bool is_normalized(const Model& model, double tol = 1e-10);

struct SchurResult {
  CoordinateChange change;    ///< orthogonal H
  Eigen::MatrixXd triangular; ///< H B H^T, lower (quasi-)triangular
  bool complex_spectrum = false;
};

/// Orthogonal H with H B H^T lower triangular. For complex spectra the result keeps
/// 2x2 diagonal blocks and `complex_spectrum` is set.
SchurResult schur_triangularize(const Eigen::MatrixXd& b);

}  // namespace ou
