#include "ouspec/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ouspec/linalg.hpp"
#include "ouspec/operator.hpp"

namespace ou {

std::vector<Complex> drift_eigenvalues(const Eigen::MatrixXd& b) {
  if (b.rows() != b.cols() || b.rows() == 0) throw Error(ErrorKind::dimension_mismatch, "B must be square");
  if (b.rows() > max_supported_dim)
    throw Error(ErrorKind::dimension_mismatch, "dimension exceeds the supported maximum");
  return eigenvalues_of(b);
}

int SpectrumElement::max_degree() const {
  int d = 0;
  for (const auto& w : witnesses) {
    int s = 0;
    for (int n : w) s += n;
    d = std::max(d, s);
  }
  return d;
}

SpectrumSet spectrum(const Model& model, int degree_cap, double tol_eig) {
  if (degree_cap < 0) throw Error(ErrorKind::invalid_params, "degree cap must be nonnegative");
  SpectrumSet out;
  out.drift = model.drift_eigenvalues();
  out.degree_cap = degree_cap;
  const GradedBasis exponents = monomial_basis(model.dim(), degree_cap);
  for (const auto& n : exponents.indices) {
    Complex value = 0.0;
    for (int j = 0; j < n.dim(); ++j) value += static_cast<double>(n[j]) * out.drift[static_cast<std::size_t>(j)];
    if (std::abs(value.imag()) <= tol_eig) value.imag(0.0);
    auto it = std::find_if(out.elements.begin(), out.elements.end(),
                           [&](const SpectrumElement& e) { return std::abs(e.value - value) <= tol_eig; });
    if (it == out.elements.end()) {
      out.elements.push_back({value, {n.exponents()}});
    } else {
      it->witnesses.push_back(n.exponents());
    }
  }
  return out;
}

namespace {

template <class S>
struct KernelResult {
  Matrix<S> kernel;  // orthonormal columns
  int index = 0;
  double residual = 0.0;
};

std::string describe(const Complex& mu) {
  std::ostringstream os;
  os.precision(12);
  os << mu.real();
  if (mu.imag() != 0.0) os << (mu.imag() < 0 ? " - " : " + ") << std::abs(mu.imag()) << "i";
  return os.str();
}

template <class S>
KernelResult<S> generalized_kernel(const Matrix<S>& a, int multiplicity, const Tolerances& tol, const Complex& mu) {
  const Eigen::Index s = a.rows();
  KernelResult<S> out;
  Eigen::BDCSVD<Matrix<S>> top(a);
  const double sigma_max = s == 0 ? 0.0 : top.singularValues()(0);
  if (sigma_max == 0.0) {
    out.kernel = Matrix<S>::Identity(s, s);
    out.index = 1;
    if (s != multiplicity)
      throw Error(ErrorKind::rank_decision_ambiguous, "kernel dimension " + std::to_string(s) + " at mu = " +
                                                          describe(mu) + ", expected " + std::to_string(multiplicity));
    return out;
  }
  const double threshold = sigma_max * tol.rank;
  Matrix<S> k(s, 0);
  for (int power = 1; power <= multiplicity; ++power) {
    const Matrix<S> p = k.cols() == 0 ? a : Matrix<S>(a - k * (k.adjoint() * a));
    Eigen::BDCSVD<Matrix<S>> svd(p, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > threshold / tol.band && sv(i) < threshold * tol.band) {
        std::ostringstream os;
        os << "singular value " << sv(i) << " inside the rank band [" << threshold / tol.band << ", "
           << threshold * tol.band << "] at mu = " << describe(mu) << ", power " << power;
        throw Error(ErrorKind::rank_decision_ambiguous, os.str());
      }
      if (sv(i) > threshold) ++rank;
    }
    const Eigen::Index dim = s - rank;
    if (dim <= k.cols()) break;
    k = svd.matrixV().rightCols(dim);
    out.index = power;
    if (dim == multiplicity) break;
  }
  if (k.cols() != multiplicity)
    throw Error(ErrorKind::rank_decision_ambiguous, "generalized kernel dimension " + std::to_string(k.cols()) +
                                                        " at mu = " + describe(mu) + ", expected multiplicity " +
                                                        std::to_string(multiplicity));
  Matrix<S> x = k;
  for (int i = 0; i < out.index; ++i) x = a * x;
  out.residual = x.norm() / (std::pow(sigma_max, out.index) * std::sqrt(static_cast<double>(multiplicity)));
  out.kernel = std::move(k);
  return out;
}

// Reduced echelon form with pivots on the highest-degree monomials (graded-lex first
// within a degree), so that each vector has a distinct leading monomial with coefficient 1.
Eigen::MatrixXcd canonical_basis(const Eigen::MatrixXcd& kernel, const GradedBasis& basis) {
  const Eigen::Index s = kernel.rows();
  const Eigen::Index m = kernel.cols();
  Eigen::MatrixXcd w = kernel.transpose();
  std::vector<Eigen::Index> rows;
  const int top = s == 0 ? 0 : basis.indices[static_cast<std::size_t>(s - 1)].degree();
  for (int d = top; d >= 0; --d) {
    const Eigen::Index begin = d == 0 ? 0 : basis.prefix_size(d - 1);
    const Eigen::Index end = std::min(s, basis.prefix_size(d));
    for (Eigen::Index r = begin; r < end; ++r) rows.push_back(r);
  }
  Eigen::Index current = 0;
  for (Eigen::Index r : rows) {
    if (current == m) break;
    Eigen::Index best = current;
    for (Eigen::Index v = current; v < m; ++v)
      if (std::abs(w(v, r)) > std::abs(w(best, r))) best = v;
    if (std::abs(w(best, r)) <= 1e-8) continue;
    w.row(best).swap(w.row(current));
    w.row(current) /= w(current, r);
    for (Eigen::Index v = 0; v < m; ++v)
      if (v != current && w(v, r) != Complex(0.0)) w.row(v) -= w(v, r) * w.row(current);
    ++current;
  }
  for (Eigen::Index v = 0; v < m; ++v)
    for (Eigen::Index c = 0; c < s; ++c) {
      Complex& z = w(v, c);
      if (std::abs(z.real()) < 1e-12) z.real(0.0);
      if (std::abs(z.imag()) < 1e-12) z.imag(0.0);
    }
  return w.transpose();
}

EigenspaceGroup extract_group(const Eigen::MatrixXd& m, const GradedBasis& basis, const SpectrumElement& element,
                              const Tolerances& tol) {
  EigenspaceGroup group;
  group.eigenvalue = element.value;
  group.witnesses = element.witnesses;
  group.multiplicity = element.multiplicity();
  const Eigen::Index s = basis.prefix_size(element.max_degree());
  Eigen::MatrixXcd kernel;
  if (element.value.imag() == 0.0) {
    Eigen::MatrixXd a = m.topLeftCorner(s, s);
    a.diagonal().array() -= element.value.real();
    auto r = generalized_kernel<double>(a, group.multiplicity, tol, element.value);
    kernel = r.kernel.cast<Complex>();
    group.nilpotency_index = r.index;
    group.residual = r.residual;
  } else {
    Eigen::MatrixXcd a = m.topLeftCorner(s, s).cast<Complex>();
    a.diagonal().array() -= element.value;
    auto r = generalized_kernel<Complex>(a, group.multiplicity, tol, element.value);
    kernel = std::move(r.kernel);
    group.nilpotency_index = r.index;
    group.residual = r.residual;
  }
  const Eigen::MatrixXcd canonical = canonical_basis(kernel, basis);
  const auto full = static_cast<Eigen::Index>(basis.size());
  for (Eigen::Index c = 0; c < canonical.cols(); ++c) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(full);
    v.head(s) = canonical.col(c);
    group.basis.push_back(from_coordinates<Complex>(v, basis));
  }
  return group;
}

}  // namespace

SpectralDecomposition generalized_eigenspaces(const Model& model, int degree_cap, const Tolerances& tol,
                                              Execution execution) {
  SpectralDecomposition dec;
  dec.degree_cap = degree_cap;
  dec.tolerances = tol;
  Eigen::MatrixXd m;
  if (model.has_exact()) {
    auto exact = operator_matrix<Rational>(model, degree_cap, OperatorTag::generator, execution);
    dec.basis = std::move(exact.basis);
    m = matrix_cast<double>(exact.entries);
  } else {
    auto approx = operator_matrix<double>(model, degree_cap, OperatorTag::generator, execution);
    dec.basis = std::move(approx.basis);
    m = std::move(approx.entries);
  }
  if (dec.basis.size() > 10000)
    throw Error(ErrorKind::invalid_params, "polynomial space of dimension " + std::to_string(dec.basis.size()) +
                                               " exceeds the supported 10^4");
  const SpectrumSet spec = spectrum(model, degree_cap, tol.eig);
  const auto count = static_cast<std::ptrdiff_t>(spec.elements.size());
  dec.groups.resize(spec.elements.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (execution == Execution::parallel)
  for (std::ptrdiff_t g = 0; g < count; ++g) {
    try {
      dec.groups[static_cast<std::size_t>(g)] = extract_group(m, dec.basis, spec.elements[static_cast<std::size_t>(g)], tol);
    } catch (...) {
#pragma omp critical(ou_eigenspace_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return dec;
}

OrthogonalityReport orthogonality_report(const SpectralDecomposition& dec, const Eigen::MatrixXd& sigma,
                                         double tol_orth) {
  OrthogonalityReport report;
  report.tol = tol_orth;
  int max_degree = 0;
  for (const auto& g : dec.groups)
    for (const auto& u : g.basis) max_degree = std::max(max_degree, u.degree());
  MomentTable<double> table(sigma);
  table.fill_to_degree(2 * max_degree);
  const FilledMoments<double> moments{table};

  std::vector<std::vector<double>> norms(dec.groups.size());
  for (std::size_t g = 0; g < dec.groups.size(); ++g) {
    const auto& group = dec.groups[g];
    for (const auto& u : group.basis) {
      const double norm = std::sqrt(inner_product(u, u, moments).real());
      norms[g].push_back(norm);
      if (std::abs(group.eigenvalue) > dec.tolerances.eig) {
        const auto one = Polynomial<Complex>::constant(u.dim(), 1.0);
        report.max_mean = std::max(report.max_mean, std::abs(inner_product(u, one, moments)) / norm);
      }
    }
  }
  for (std::size_t a = 0; a < dec.groups.size(); ++a)
    for (std::size_t b = a + 1; b < dec.groups.size(); ++b) report.pairs.push_back({a, b, 0.0, true, {}});

  const auto count = static_cast<std::ptrdiff_t>(report.pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t p = 0; p < count; ++p) {
    auto& pair = report.pairs[static_cast<std::size_t>(p)];
    const auto& u = dec.groups[pair.first].basis;
    const auto& v = dec.groups[pair.second].basis;
    pair.gram.resize(static_cast<Eigen::Index>(u.size()), static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) {
        const Complex value = inner_product(u[i], v[j], moments);
        pair.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
        pair.max_normalized =
            std::max(pair.max_normalized, std::abs(value) / (norms[pair.first][i] * norms[pair.second][j]));
      }
    pair.orthogonal = pair.max_normalized < tol_orth;
  }
  for (const auto& pair : report.pairs) report.orthogonal = report.orthogonal && pair.orthogonal;
  return report;
}

ExactOrthogonalityReport exact_orthogonality_report(const std::vector<ExactGroup>& groups, const RationalMatrix& sigma) {
  ExactOrthogonalityReport report;
  MomentTable<Rational> table(sigma);
  for (std::size_t a = 0; a < groups.size(); ++a)
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      if (groups[a].eigenvalue == groups[b].eigenvalue) continue;
      ExactPairVerdict pair;
      pair.first = a;
      pair.second = b;
      pair.gram.resize(static_cast<Eigen::Index>(groups[a].basis.size()), static_cast<Eigen::Index>(groups[b].basis.size()));
      for (std::size_t i = 0; i < groups[a].basis.size(); ++i)
        for (std::size_t j = 0; j < groups[b].basis.size(); ++j) {
          const Rational value = inner_product(groups[a].basis[i], groups[b].basis[j], table);
          pair.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
          if (value != 0) pair.orthogonal = false;
        }
      report.orthogonal = report.orthogonal && pair.orthogonal;
      report.pairs.push_back(std::move(pair));
    }
  return report;
}

std::vector<Polynomial<Rational>> hermite_space_basis(const RationalMatrix& sigma, int degree) {
  const int n = static_cast<int>(sigma.rows());
  const GradedBasis top = monomial_basis(n, degree, Ordering::graded_lex, true);
  std::vector<Polynomial<Rational>> out;
  if (degree == 0) {
    out.push_back(Polynomial<Rational>::constant(n, 1));
    return out;
  }
  const GradedBasis lower = monomial_basis(n, degree - 1);
  MomentTable<Rational> table(sigma);
  const auto r = static_cast<Eigen::Index>(lower.size());
  const auto t = static_cast<Eigen::Index>(top.size());
  RationalMatrix g(r, r), rhs(r, t);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j)
      g(i, j) = table(lower.indices[static_cast<std::size_t>(i)] + lower.indices[static_cast<std::size_t>(j)]);
    for (Eigen::Index j = 0; j < t; ++j)
      rhs(i, j) = table(lower.indices[static_cast<std::size_t>(i)] + top.indices[static_cast<std::size_t>(j)]);
  }
  const RationalMatrix coeffs = linalg::solve_exact(g, rhs);
  for (Eigen::Index j = 0; j < t; ++j) {
    Polynomial<Rational> u = Polynomial<Rational>::monomial(top.indices[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < r; ++i) u.add_term(lower.indices[static_cast<std::size_t>(i)], -coeffs(i, j));
    out.push_back(std::move(u));
  }
  return out;
}

double b_eigenvector_angle(const Eigen::MatrixXd& b, double tol) {
  if (b.rows() != 2 || b.cols() != 2)
    throw Error(ErrorKind::unsupported_dimension, "eigenvector angle is defined for 2x2 drift matrices");
  const auto lambda = eigenvalues_of(b);
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (std::abs(lambda[0].imag()) > tol * scale)
    throw Error(ErrorKind::complex_spectrum, "drift eigenvalues are not real");
  if (std::abs(lambda[0].real() - lambda[1].real()) <= tol * scale)
    throw Error(ErrorKind::repeated_eigenvalue, "drift eigenvalues coincide");
  Eigen::Vector2d v[2];
  for (int k = 0; k < 2; ++k) {
    Eigen::Matrix2d shifted = b;
    shifted.diagonal().array() -= lambda[static_cast<std::size_t>(k)].real();
    const Eigen::Index row = shifted.row(0).norm() >= shifted.row(1).norm() ? 0 : 1;
    v[k] = Eigen::Vector2d(-shifted(row, 1), shifted(row, 0)).normalized();
  }
  const double cosine = std::min(1.0, std::abs(v[0].dot(v[1])));
  return std::acos(cosine);
}

}  // namespace ou
