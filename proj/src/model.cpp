#include "ouspec/model.hpp"

#include <algorithm>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "ouspec/linalg.hpp"

namespace ou {

namespace {

std::string format_complex(const Complex& z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

std::vector<Complex> eigenvalues_of(const Eigen::MatrixXd& m) {
  std::vector<Complex> out;
  const bool lower = m.isApprox(Eigen::MatrixXd(m.triangularView<Eigen::Lower>()), 0.0);
  const bool upper = m.isApprox(Eigen::MatrixXd(m.triangularView<Eigen::Upper>()), 0.0);
  if (lower || upper) {
    // Triangular input: the diagonal is the spectrum, with no rounding.
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m(i, i), 0.0);
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::convergence_failure, "eigen-solver did not converge");
    out.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  }
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

void Model::check_shapes(Eigen::Index qr, Eigen::Index qc, Eigen::Index br, Eigen::Index bc) {
  if (qr == 0 || qr != qc || br != bc || qr != br)
    throw Error(ErrorKind::dimension_mismatch, "Q and B must be nonempty square matrices of equal size");
  if (qr > max_supported_dim)
    throw Error(ErrorKind::dimension_mismatch, "dimension " + std::to_string(qr) + " exceeds the supported maximum of " +
                                                   std::to_string(max_supported_dim));
}

Model Model::validate(const RationalMatrix& q, const RationalMatrix& b, double tol_hurwitz) {
  check_shapes(q.rows(), q.cols(), b.rows(), b.cols());
  const Eigen::Index n = q.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (q(i, j) != q(j, i))
        throw Error(ErrorKind::not_symmetric, "Q(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") = " +
                                                  to_string(q(i, j)) + " but Q(" + std::to_string(j + 1) + "," +
                                                  std::to_string(i + 1) + ") = " + to_string(q(j, i)));
  for (Eigen::Index k = 1; k <= n; ++k) {
    const Rational minor = linalg::determinant_exact(q.topLeftCorner(k, k));
    if (minor <= 0)
      throw Error(ErrorKind::not_positive_definite,
                  "leading principal minor of order " + std::to_string(k) + " is " + to_string(minor));
  }
  Model m;
  m.exact_q_ = q;
  m.exact_b_ = b;
  m.q_ = matrix_cast<double>(q);
  m.b_ = matrix_cast<double>(b);
  m.finish(tol_hurwitz);
  return m;
}

Model Model::validate(const Eigen::MatrixXd& q, const Eigen::MatrixXd& b, double tol_hurwitz) {
  check_shapes(q.rows(), q.cols(), b.rows(), b.cols());
  const Eigen::Index n = q.rows();
  const double scale = std::max(q.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(q(i, j) - q(j, i)) > 1e-12 * scale)
        throw Error(ErrorKind::not_symmetric, "Q(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                                  ") differs from Q(" + std::to_string(j + 1) + "," +
                                                  std::to_string(i + 1) + ")");
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double minor = Eigen::MatrixXd(q.topLeftCorner(k, k)).determinant();
    if (!(minor > 0.0))
      throw Error(ErrorKind::not_positive_definite,
                  "leading principal minor of order " + std::to_string(k) + " is " + std::to_string(minor));
  }
  Model m;
  m.q_ = symmetrized(q);
  m.b_ = b;
  m.finish(tol_hurwitz);
  return m;
}

void Model::finish(double tol_hurwitz) {
  eigenvalues_ = eigenvalues_of(b_);
  for (const auto& z : eigenvalues_)
    if (!(z.real() < -tol_hurwitz))
      throw Error(ErrorKind::not_hurwitz, "drift eigenvalue " + format_complex(z) + " of B has real part >= -" +
                                              format_real(tol_hurwitz));
}

const RationalMatrix& Model::q_exact() const {
  if (!exact_q_) throw Error(ErrorKind::basis_unavailable, "model has no exact rational entries");
  return *exact_q_;
}

const RationalMatrix& Model::b_exact() const {
  if (!exact_b_) throw Error(ErrorKind::basis_unavailable, "model has no exact rational entries");
  return *exact_b_;
}

Model Model::as_float() const {
  Model m(*this);
  m.exact_q_.reset();
  m.exact_b_.reset();
  return m;
}

CoordinateChange CoordinateChange::identity(int n) {
  return {Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(n, n), ChangeKind::orthogonal};
}

CoordinateChange CoordinateChange::from(Eigen::MatrixXd h, ChangeKind kind) {
  CoordinateChange c;
  c.h_inv = kind == ChangeKind::orthogonal ? Eigen::MatrixXd(h.transpose()) : Eigen::MatrixXd(h.inverse());
  c.h = std::move(h);
  c.kind = kind;
  return c;
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m, double s) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::dimension_mismatch, "matrix_exponential needs a square matrix");
  if (s == 0.0) return Eigen::MatrixXd::Identity(m.rows(), m.cols());
  return Eigen::MatrixXd(s * m).exp();
}

CovarianceMatrix solve_lyapunov(const Model& model) {
  const int n = model.dim();
  CovarianceMatrix out;
  if (model.has_exact()) {
    const RationalMatrix k = linalg::lyapunov_operator<Rational>(model.b_exact());
    RationalMatrix rhs(n * n, 1);
    for (int col = 0; col < n; ++col)
      for (int i = 0; i < n; ++i) rhs(col * n + i, 0) = -model.q_exact()(i, col);
    const RationalMatrix x = linalg::solve_exact(k, rhs);
    RationalMatrix sigma(n, n);
    for (int col = 0; col < n; ++col)
      for (int i = 0; i < n; ++i) sigma(i, col) = x(col * n + i, 0);
    out.sigma = matrix_cast<double>(sigma);
    out.exact = std::move(sigma);
    return out;
  }
  const Eigen::MatrixXd k = linalg::lyapunov_operator<double>(model.b());
  const Eigen::Map<const Eigen::VectorXd> q_vec(model.q().data(), n * n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  if (!lu.isInvertible()) throw Error(ErrorKind::singular_system, "Lyapunov operator is singular");
  Eigen::VectorXd x = lu.solve(-q_vec);
  out.sigma = symmetrized(Eigen::Map<Eigen::MatrixXd>(x.data(), n, n));
  return out;
}

CovarianceMatrix covariance_at(const Model& model, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::invalid_params, "covariance_at needs t > 0");
  const CovarianceMatrix inf = solve_lyapunov(model);
  const Eigen::MatrixXd e = matrix_exponential(model.b(), t);
  CovarianceMatrix out;
  out.t = t;
  out.sigma = symmetrized(inf.sigma - e * inf.sigma * e.transpose());
  return out;
}

Model transform_model(const Model& model, const CoordinateChange& change) {
  const Eigen::MatrixXd q = change.h * model.q() * change.h.transpose();
  const Eigen::MatrixXd b = change.h * model.b() * change.h_inv;
  return Model::validate(Eigen::MatrixXd(symmetrized(q)), b);
}

Normalization normalize_model(const Model& model) {
  const int n = model.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> q_eig(model.q());
  const Eigen::MatrixXd h1 = q_eig.eigenvectors() *
                             q_eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                             q_eig.eigenvectors().transpose();
  const Eigen::MatrixXd sigma = solve_lyapunov(model).sigma;
  const Eigen::MatrixXd whitened = symmetrized(h1 * sigma * h1.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s_eig(whitened);
  const Eigen::MatrixXd h2 = s_eig.eigenvectors().transpose();
  const Eigen::MatrixXd h = h2 * h1;

  Normalization out{CoordinateChange::from(h, ChangeKind::general_linear), model.as_float(), {}};
  // keep Q~ exactly the identity; the rotation is orthogonal so this is only rounding
  const Eigen::MatrixXd b = h * model.b() * out.change.h_inv;
  out.model = Model::validate(Eigen::MatrixXd::Identity(n, n), b);
  out.stationary_diagonal = s_eig.eigenvalues();
  return out;
}

bool is_normalized(const Model& model, double tol) {
  const int n = model.dim();
  if ((model.q() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > tol) return false;
  const Eigen::MatrixXd sigma = solve_lyapunov(model).sigma;
  Eigen::MatrixXd off = sigma;
  off.diagonal().setZero();
  return off.cwiseAbs().maxCoeff() <= tol * std::max(1.0, sigma.cwiseAbs().maxCoeff());
}

SchurResult schur_triangularize(const Eigen::MatrixXd& b) {
  if (b.rows() != b.cols()) throw Error(ErrorKind::dimension_mismatch, "schur_triangularize needs a square matrix");
  // B^T = U T U^T with T upper quasi-triangular, so U^T B U = T^T is lower.
  Eigen::RealSchur<Eigen::MatrixXd> schur(b.transpose());
  if (schur.info() != Eigen::Success) throw Error(ErrorKind::convergence_failure, "real Schur iteration failed");
  SchurResult out;
  out.change = CoordinateChange::from(schur.matrixU().transpose(), ChangeKind::orthogonal);
  Eigen::MatrixXd t = schur.matrixT();
  for (Eigen::Index i = 1; i < t.rows(); ++i)
    if (t(i, i - 1) != 0.0) out.complex_spectrum = true;
  out.triangular = t.transpose();
  return out;
}

}  // namespace ou
