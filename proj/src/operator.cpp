#include "ouspec/operator.hpp"

#include <cmath>

namespace ou {

const char* to_string(OperatorTag tag) {
  switch (tag) {
    case OperatorTag::generator: return "L";
    case OperatorTag::doubled: return "A=2L";
    case OperatorTag::drift: return "drift";
    case OperatorTag::diffusion: return "diffusion";
    case OperatorTag::rotation: return "rotation";
    case OperatorTag::nilpotent: return "nilpotent";
  }
  return "unknown";
}

namespace {

Eigen::VectorXd stationary_diagonal(const Model& normalized) {
  return solve_lyapunov(normalized).sigma.diagonal();
}

}  // namespace

std::vector<Polynomial<double>> hermite_basis(const Model& normalized, int degree) {
  if (!is_normalized(normalized))
    throw Error(ErrorKind::basis_unavailable, "Hermite basis needs Q = I and a diagonal stationary covariance");
  const Eigen::VectorXd dilation = (2.0 * stationary_diagonal(normalized)).cwiseSqrt();
  const std::vector<double> dil(dilation.data(), dilation.data() + dilation.size());
  const GradedBasis ks = monomial_basis(normalized.dim(), degree);
  std::vector<Polynomial<double>> out;
  out.reserve(ks.size());
  for (const auto& k : ks.indices) out.push_back(hermite_tensor(k, dil, true));
  return out;
}

OperatorMatrix<double> operator_matrix_hermite(const Model& normalized, int degree, OperatorTag tag) {
  if (tag != OperatorTag::generator && tag != OperatorTag::doubled)
    throw Error(ErrorKind::basis_unavailable, "operator_matrix_hermite assembles L or 2L only");
  if (!is_normalized(normalized))
    throw Error(ErrorKind::basis_unavailable, "Hermite basis needs Q = I and a diagonal stationary covariance");
  OperatorMatrix<double> out;
  out.basis = monomial_basis(normalized.dim(), degree);
  out.tag = tag;
  out.basis_kind = BasisKind::hermite_normal_form;

  // Work in y = x / delta, where the stationary law is N(0, I/2) and the Hermite
  // polynomials have integer coefficients. Inner products are then free of
  // cancellation error whenever the scaled model is exactly representable, and
  // the normalization is applied once at the end.
  const Eigen::VectorXd delta = (2.0 * stationary_diagonal(normalized)).cwiseSqrt();
  const Eigen::MatrixXd q = delta.cwiseInverse().asDiagonal() * normalized.q() * delta.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd b = delta.cwiseInverse().asDiagonal() * normalized.b() * delta.asDiagonal();
  const auto n = static_cast<Eigen::Index>(out.basis.size());
  std::vector<Polynomial<double>> hermite;
  std::vector<double> norms;
  hermite.reserve(out.basis.size());
  for (const auto& k : out.basis.indices) {
    hermite.push_back(hermite_tensor<double>(k));
    norms.push_back(std::sqrt(hermite_norm_squared(k).convert_to<double>()));
  }

  MomentTable<double> table(Eigen::MatrixXd(0.5 * Eigen::MatrixXd::Identity(normalized.dim(), normalized.dim())));
  table.fill_to_degree(2 * degree);
  const FilledMoments<double> moments{table};
  const double factor = tag == OperatorTag::doubled ? 2.0 : 1.0;
  out.entries = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < n; ++j) {
    const Polynomial<double> image = apply_generator(q, b, hermite[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < n; ++i)
      out.entries(i, j) = factor * inner_product(image, hermite[static_cast<std::size_t>(i)], moments) /
                          (norms[static_cast<std::size_t>(i)] * norms[static_cast<std::size_t>(j)]);
  }
  return out;
}

double RotationSplit::skew_defect() const {
  const Eigen::MatrixXd cd = c * d_lambda.asDiagonal();
  return (cd + cd.transpose()).cwiseAbs().maxCoeff();
}

double RotationSplit::c_skew_defect() const { return (c + c.transpose()).cwiseAbs().maxCoeff(); }

RotationSplit rotation_split(const Model& normalized, double tol) {
  if (!is_normalized(normalized, tol))
    throw Error(ErrorKind::not_normalized, "rotation split needs Q = I and a diagonal stationary covariance");
  RotationSplit split;
  split.d_lambda = stationary_diagonal(normalized);
  split.c = 2.0 * normalized.b();
  split.c.diagonal() += split.d_lambda.cwiseInverse();
  return split;
}

Eigen::MatrixXd hermite_rotation_matrix(const RotationSplit& split, int degree) {
  if (split.c.rows() != 2)
    throw Error(ErrorKind::unsupported_dimension, "the closed-form Hermite rotation matrix is defined for N = 2");
  if (degree < 0) throw Error(ErrorKind::invalid_params, "degree must be nonnegative");
  const double w = split.c(0, 1) * std::sqrt(split.d_lambda(1) / split.d_lambda(0));
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(degree + 1, degree + 1);
  for (int k = 0; k < degree; ++k) {
    const double entry = w * std::sqrt(static_cast<double>(k + 1)) * std::sqrt(static_cast<double>(degree - k));
    l(k + 1, k) = entry;
    l(k, k + 1) = -entry;
  }
  return l;
}

Polynomial<double> semigroup_apply(const Model& model, double t, const Polynomial<double>& p) {
  const int n = model.dim();
  if (p.dim() != n) throw Error(ErrorKind::dimension_mismatch, "semigroup_apply: polynomial dimension differs from model");
  const Eigen::MatrixXd e = matrix_exponential(model.b(), t);
  MomentTable<double> noise(covariance_at(model, t).sigma);

  // variables 0..n-1 are x, n..2n-1 are y; the sign of y is irrelevant for a centered law
  std::vector<Polynomial<double>> linear(static_cast<std::size_t>(n), Polynomial<double>(2 * n));
  for (int i = 0; i < n; ++i) {
    auto& li = linear[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) li.add_term(MultiIndex::unit(2 * n, j), e(i, j));
    li.add_term(MultiIndex::unit(2 * n, n + i), -1.0);
  }
  std::vector<std::vector<Polynomial<double>>> powers(static_cast<std::size_t>(n));
  auto power = [&](int i, int k) -> const Polynomial<double>& {
    auto& cache = powers[static_cast<std::size_t>(i)];
    if (cache.empty()) cache.push_back(Polynomial<double>::constant(2 * n, 1.0));
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * linear[static_cast<std::size_t>(i)]);
    return cache[static_cast<std::size_t>(k)];
  };

  Polynomial<double> out(n);
  for (const auto& [alpha, c] : p.terms()) {
    Polynomial<double> expanded = Polynomial<double>::constant(2 * n, c);
    for (int i = 0; i < n; ++i)
      if (alpha[i] > 0) expanded = expanded * power(i, alpha[i]);
    for (const auto& [gamma, coeff] : expanded.terms()) {
      std::vector<int> xs(gamma.exponents().begin(), gamma.exponents().begin() + n);
      std::vector<int> ys(gamma.exponents().begin() + n, gamma.exponents().end());
      const double m = noise(MultiIndex(std::move(ys)));
      if (m != 0.0) out.add_term(MultiIndex(std::move(xs)), coeff * m);
    }
  }
  return out;
}

NormalityCheck check_normal(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::dimension_mismatch, "check_normal needs a square matrix");
  NormalityCheck out;
  out.defect = m.size() == 0 ? 0.0 : (m * m.adjoint() - m.adjoint() * m).cwiseAbs().maxCoeff();
  out.normal = out.defect < tol;
  return out;
}

}  // namespace ou
