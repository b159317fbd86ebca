#pragma once

#include <vector>

#include "ouspec/gaussian.hpp"
#include "ouspec/model.hpp"
#include "ouspec/polynomial.hpp"

namespace ou {

// Generator L f = 1/2 tr(Q Hess f) + <Bx, grad f>, split as L = S + D with
// drift part D f = <Bx, grad f> (keeps homogeneous degree) and diffusion part
// S f = 1/2 tr(Q Hess f) (lowers degree by two).

template <class T>
Polynomial<T> apply_drift(const Matrix<T>& b, const Polynomial<T>& p) {
  const int n = static_cast<int>(b.rows());
  if (p.dim() != n) throw Error(ErrorKind::dimension_mismatch, "apply_drift: polynomial dimension differs from B");
  Polynomial<T> out(n);
  for (const auto& [alpha, c] : p.terms())
    for (int i = 0; i < n; ++i) {
      if (alpha[i] == 0) continue;
      // (Bx)_i d/dx_i x^alpha = alpha_i sum_j B_ij x^{alpha - e_i + e_j}
      const T scaled = c * T(alpha[i]);
      for (int j = 0; j < n; ++j)
        if (b(i, j) != T(0)) out.add_term(alpha.shifted(j, i), scaled * b(i, j));
    }
  return out;
}

template <class T>
Polynomial<T> apply_diffusion(const Matrix<T>& q, const Polynomial<T>& p) {
  const int n = static_cast<int>(q.rows());
  if (p.dim() != n) throw Error(ErrorKind::dimension_mismatch, "apply_diffusion: polynomial dimension differs from Q");
  Polynomial<T> out(n);
  for (const auto& [alpha, c] : p.terms())
    for (int i = 0; i < n; ++i) {
      if (alpha[i] == 0) continue;
      const MultiIndex di = alpha.decremented(i);
      // diagonal: 1/2 Q_ii alpha_i (alpha_i - 1); off-diagonal pairs counted once with weight Q_ij
      if (alpha[i] >= 2 && q(i, i) != T(0))
        out.add_term(di.decremented(i), c * q(i, i) * T(alpha[i] * (alpha[i] - 1)) / T(2));
      for (int j = i + 1; j < n; ++j)
        if (alpha[j] > 0 && q(i, j) != T(0))
          out.add_term(di.decremented(j), c * q(i, j) * T(alpha[i] * alpha[j]));
    }
  return out;
}

template <class T>
Polynomial<T> apply_generator(const Matrix<T>& q, const Matrix<T>& b, const Polynomial<T>& p) {
  return apply_drift(b, p) + apply_diffusion(q, p);
}

/// L p, in the backend of p (Rational needs an exact model).
template <class T>
Polynomial<T> apply_L(const Model& model, const Polynomial<T>& p) {
  if (p.dim() != model.dim()) throw Error(ErrorKind::dimension_mismatch, "apply_L: polynomial dimension differs from model");
  return apply_generator(model.q_as<T>(), model.b_as<T>(), p);
}

enum class OperatorTag { generator, doubled, drift, diffusion, rotation, nilpotent };
enum class BasisKind { monomial, hermite_normal_form };

const char* to_string(OperatorTag tag);

template <class T>
struct OperatorMatrix {
  GradedBasis basis;
  Matrix<T> entries;
  OperatorTag tag = OperatorTag::generator;
  BasisKind basis_kind = BasisKind::monomial;
};

namespace kernels {

/// Column j holds the basis coordinates of op(basis_j).
template <class T, class Op>
Matrix<T> assemble_serial(const GradedBasis& basis, Op&& op) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Matrix<T> m = Matrix<T>::Constant(n, n, T(0));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Polynomial<T> image = op(Polynomial<T>::monomial(basis.indices[static_cast<std::size_t>(j)]));
    m.col(j) = coordinates(image, basis);
  }
  return m;
}

template <class T, class Op>
Matrix<T> assemble_parallel(const GradedBasis& basis, Op&& op) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Matrix<T> m = Matrix<T>::Constant(n, n, T(0));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < n; ++j) {
    try {
      const Polynomial<T> image = op(Polynomial<T>::monomial(basis.indices[static_cast<std::size_t>(j)]));
      m.col(j) = coordinates(image, basis);
    } catch (...) {
#pragma omp critical(ou_assemble_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return m;
}

}  // namespace kernels

/// Matrix of L (or A = 2L) on the graded-lex monomial basis of degree <= n.
/// Block upper triangular by degree.
template <class T>
OperatorMatrix<T> operator_matrix(const Model& model, int degree, OperatorTag tag = OperatorTag::generator,
                                  Execution execution = Execution::parallel) {
  if (tag != OperatorTag::generator && tag != OperatorTag::doubled)
    throw Error(ErrorKind::basis_unavailable, "operator_matrix assembles L or 2L only");
  OperatorMatrix<T> out;
  out.basis = monomial_basis(model.dim(), degree);
  out.tag = tag;
  const Matrix<T> q = model.q_as<T>();
  const Matrix<T> b = model.b_as<T>();
  auto op = [&](const Polynomial<T>& p) {
    Polynomial<T> image = apply_generator(q, b, p);
    if (tag == OperatorTag::doubled) image *= T(2);
    return image;
  };
  out.entries = execution == Execution::serial ? kernels::assemble_serial<T>(out.basis, op)
                                                : kernels::assemble_parallel<T>(out.basis, op);
  return out;
}

/// Normalized dilated Hermite basis of a normalized model (Q = I, Q_inf diagonal):
/// H~_k with dilation sqrt(2 Q_inf_ii), |k| <= n, graded-lex in k.
std::vector<Polynomial<double>> hermite_basis(const Model& normalized, int degree);

/// Matrix of L (or 2L) in the orthonormal Hermite basis; entry (i, j) = <op H~_j, H~_i>.
/// Throws BasisUnavailable when the model is not normalized.
OperatorMatrix<double> operator_matrix_hermite(const Model& normalized, int degree,
                                               OperatorTag tag = OperatorTag::doubled);

/// Matrix of f -> <Bx, grad f> on homogeneous degree-n monomials.
template <class T>
OperatorMatrix<T> homogeneous_drift_matrix(const Matrix<T>& b, int degree, Ordering ordering = Ordering::v_nondecreasing) {
  OperatorMatrix<T> out;
  out.basis = monomial_basis(static_cast<int>(b.rows()), degree, ordering, true);
  out.tag = OperatorTag::drift;
  out.entries = kernels::assemble_serial<T>(out.basis, [&](const Polynomial<T>& p) { return apply_drift(b, p); });
  return out;
}

/// For B = lambda I + R, the matrix of x^alpha -> sum_i (R x)_i d_i x^alpha on degree-n monomials,
/// i.e. the homogeneous drift matrix minus lambda n I.
template <class T>
OperatorMatrix<T> nilpotent_part(const Matrix<T>& b, const T& lambda, int degree,
                                 Ordering ordering = Ordering::v_nondecreasing) {
  OperatorMatrix<T> out = homogeneous_drift_matrix(b, degree, ordering);
  for (Eigen::Index i = 0; i < out.entries.rows(); ++i) out.entries(i, i) -= lambda * T(degree);
  out.tag = OperatorTag::nilpotent;
  return out;
}

/// Split 2L = A1 + <Cx, grad> of a normalized model, with A1 = Laplacian - <D^{-1}x, grad>.
struct RotationSplit {
  Eigen::VectorXd d_lambda;  ///< diagonal of D (= diagonal stationary covariance)
  Eigen::MatrixXd c;         ///< C = 2B + D^{-1}

  /// max |(CD) + (CD)^T|; C D is skew for every normalized model.
  double skew_defect() const;
  /// max |C + C^T|; zero when D is a multiple of the identity.
  double c_skew_defect() const;
};

RotationSplit rotation_split(const Model& normalized, double tol = 1e-10);

/// Closed-form matrix of <Cx, grad> on H_n (N = 2) in the basis H~_{n-k,k}, k = 0..n:
/// L(k+1,k) = w sqrt(k+1) sqrt(n-k) = -L(k,k+1), w = c12 sqrt(lambda2 / lambda1).
Eigen::MatrixXd hermite_rotation_matrix(const RotationSplit& split, int degree);

/// H_t p(x) = E[p(e^{tB} x - Y)], Y ~ N(0, Q_t), evaluated in closed form.
Polynomial<double> semigroup_apply(const Model& model, double t, const Polynomial<double>& p);

struct NormalityCheck {
  bool normal = false;
  double defect = 0.0;  ///< max |M M* - M* M|
};

NormalityCheck check_normal(const Eigen::MatrixXcd& m, double tol);

}  // namespace ou
