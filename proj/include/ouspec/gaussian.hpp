#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ouspec/core.hpp"
#include "ouspec/polynomial.hpp"

namespace ou {

enum class Execution { serial, parallel };

/// Centered Gaussian N(0, Sigma). Keeps the exact covariance when one is known.
class GaussianMeasure {
 public:
  explicit GaussianMeasure(Eigen::MatrixXd covariance);
  explicit GaussianMeasure(const RationalMatrix& covariance);

  int dim() const { return static_cast<int>(covariance_.rows()); }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const std::optional<RationalMatrix>& exact_covariance() const { return exact_; }

  /// (2 pi)^{-N/2} (det Sigma)^{-1/2}
  double normalization() const;
  double density(std::span<const double> x) const;

 private:
  Eigen::MatrixXd covariance_;
  std::optional<RationalMatrix> exact_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Memoized E[x^alpha] under N(0, Sigma), via
/// E[x_i x^beta] = sum_j Sigma_ij beta_j E[x^{beta - e_j}].
/// One table per evaluation context; not shared between threads while filling.
template <class R>
class MomentTable {
 public:
  explicit MomentTable(Matrix<R> sigma) : sigma_(std::move(sigma)) {
    if (sigma_.rows() != sigma_.cols()) throw Error(ErrorKind::dimension_mismatch, "covariance must be square");
  }

  int dim() const { return static_cast<int>(sigma_.rows()); }
  const Matrix<R>& sigma() const { return sigma_; }

  const R& operator()(const MultiIndex& alpha) {
    if (alpha.dim() != dim()) throw Error(ErrorKind::dimension_mismatch, "moment index has wrong dimension");
    if (alpha.degree() % 2 == 1) return zero_;
    if (auto it = table_.find(alpha); it != table_.end()) return it->second;
    R value = compute(alpha);
    return table_.emplace(alpha, std::move(value)).first->second;
  }

  /// Lookup without insertion; all moments of degree <= filled_degree() are present.
  const R& at(const MultiIndex& alpha) const {
    if (alpha.degree() % 2 == 1) return zero_;
    return table_.at(alpha);
  }

  /// Precomputes every moment up to total degree d so that at() is usable concurrently.
  void fill_to_degree(int d) {
    if (d <= filled_) return;
    const GradedBasis all = monomial_basis(dim(), d);
    for (const auto& alpha : all.indices) (*this)(alpha);
    filled_ = d;
  }
  int filled_degree() const { return filled_; }

 private:
  R compute(const MultiIndex& alpha) {
    if (alpha.degree() == 0) return R(1);
    int i = 0;
    while (alpha[i] == 0) ++i;
    const MultiIndex beta = alpha.decremented(i);
    R sum = R(0);
    for (int j = 0; j < dim(); ++j) {
      if (beta[j] == 0 || sigma_(i, j) == R(0)) continue;
      sum += sigma_(i, j) * R(beta[j]) * (*this)(beta.decremented(j));
    }
    return sum;
  }

  Matrix<R> sigma_;
  std::map<MultiIndex, R, GradedLexLess> table_;
  R zero_ = R(0);
  int filled_ = -1;
};

template <class R>
R gaussian_moment(const Matrix<R>& sigma, const MultiIndex& alpha) {
  MomentTable<R> table(sigma);
  return table(alpha);
}

/// <p, q> = sum c_p conj(c_q) E[x^{alpha+beta}], conjugate-linear in q.
template <class T, class Table>
  requires requires(const Table& t) { t.dim(); }
T inner_product(const Polynomial<T>& p, const Polynomial<T>& q, Table& moments) {
  if (p.dim() != moments.dim() || q.dim() != moments.dim())
    throw Error(ErrorKind::dimension_mismatch, "inner_product: polynomial and covariance dimensions differ");
  T sum = T(0);
  for (const auto& [a, ca] : p.terms())
    for (const auto& [b, cb] : q.terms()) {
      const auto& m = moments(a + b);
      if (m == real_t<T>(0)) continue;
      sum += ca * scalar_traits<T>::conj(cb) * m;
    }
  return sum;
}

template <class T>
T inner_product(const Polynomial<T>& p, const Polynomial<T>& q, const Matrix<real_t<T>>& sigma) {
  MomentTable<real_t<T>> table(sigma);
  return inner_product(p, q, table);
}

/// Read-only adapter over a pre-filled table, for concurrent use.
template <class R>
struct FilledMoments {
  const MomentTable<R>& table;
  int dim() const { return table.dim(); }
  const R& operator()(const MultiIndex& alpha) const { return table.at(alpha); }
};

namespace kernels {

/// Reference implementation: one lazily memoized table, plain double loop.
template <class T>
Matrix<T> gram_serial(std::span<const Polynomial<T>> fs, const Matrix<real_t<T>>& sigma) {
  const auto n = static_cast<Eigen::Index>(fs.size());
  Matrix<T> g(n, n);
  MomentTable<real_t<T>> table(sigma);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      g(i, j) = inner_product(fs[static_cast<std::size_t>(i)], fs[static_cast<std::size_t>(j)], table);
      g(j, i) = scalar_traits<T>::conj(g(i, j));
    }
  return g;
}

/// Prefills the moment table serially, then distributes the lower triangle over threads.
template <class T>
Matrix<T> gram_parallel(std::span<const Polynomial<T>> fs, const Matrix<real_t<T>>& sigma) {
  const auto n = static_cast<Eigen::Index>(fs.size());
  Matrix<T> g(n, n);
  int max_degree = 0;
  for (const auto& f : fs) {
    if (f.dim() != sigma.rows()) throw Error(ErrorKind::dimension_mismatch, "gram: polynomial dimension differs from covariance");
    max_degree = std::max(max_degree, f.degree());
  }
  MomentTable<real_t<T>> table(sigma);
  table.fill_to_degree(2 * max_degree);
  const FilledMoments<real_t<T>> moments{table};
  const Eigen::Index pairs = n * (n + 1) / 2;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index k = 0; k < pairs; ++k) {
    // k -> (i, j) with j <= i
    Eigen::Index i = static_cast<Eigen::Index>((std::sqrt(8.0 * static_cast<double>(k) + 1.0) - 1.0) / 2.0);
    while (i * (i + 1) / 2 > k) --i;
    while ((i + 1) * (i + 2) / 2 <= k) ++i;
    const Eigen::Index j = k - i * (i + 1) / 2;
    g(i, j) = inner_product(fs[static_cast<std::size_t>(i)], fs[static_cast<std::size_t>(j)], moments);
    g(j, i) = scalar_traits<T>::conj(g(i, j));
  }
  return g;
}

}  // namespace kernels

template <class T>
Matrix<T> gram_matrix(std::span<const Polynomial<T>> fs, const Matrix<real_t<T>>& sigma,
                      Execution execution = Execution::parallel) {
  for (const auto& f : fs)
    if (f.dim() != sigma.rows()) throw Error(ErrorKind::dimension_mismatch, "gram: polynomial dimension differs from covariance");
  return execution == Execution::serial ? kernels::gram_serial(fs, sigma) : kernels::gram_parallel(fs, sigma);
}

}  // namespace ou
