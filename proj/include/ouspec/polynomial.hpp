#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ouspec/core.hpp"

namespace ou {

/// Exponent vector alpha in N^N with its cached total degree |alpha|.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int dim) : exponents_(static_cast<std::size_t>(dim), 0) {}
  explicit MultiIndex(std::vector<int> exponents);
  MultiIndex(std::initializer_list<int> exponents) : MultiIndex(std::vector<int>(exponents)) {}

  static MultiIndex unit(int dim, int i) {
    MultiIndex e(dim);
    e.exponents_[static_cast<std::size_t>(i)] = 1;
    e.degree_ = 1;
    return e;
  }

  int dim() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exponents_; }

  MultiIndex operator+(const MultiIndex& other) const;
  /// alpha + e_i - e_j; requires alpha_j >= 1 (or i == j).
  MultiIndex shifted(int up, int down) const;
  MultiIndex incremented(int i) const;
  MultiIndex decremented(int i) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Degree ascending, then exponents lexicographically descending:
/// 1 < x1 < x2 < x1^2 < x1 x2 < x2^2 < ...
struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return std::lexicographical_compare(a.exponents().begin(), a.exponents().end(),
                                        b.exponents().begin(), b.exponents().end(),
                                        std::greater<>());
  }
};

/// V(alpha) = sum_j j * alpha_j with 1-based coordinate index j.
int v_order(const MultiIndex& alpha);

/// alpha^(i) = alpha + e_{i-1} - e_i for 0-based i >= 1 with alpha_i >= 1.
MultiIndex jordan_shift(const MultiIndex& alpha, int i);

enum class Ordering { graded_lex, v_nondecreasing };

struct GradedBasis {
  int dim = 0;
  int degree = 0;
  Ordering ordering = Ordering::graded_lex;
  bool homogeneous = false;
  std::vector<MultiIndex> indices;

  std::size_t size() const { return indices.size(); }
  /// Position of alpha in `indices`, or -1.
  Eigen::Index position(const MultiIndex& alpha) const;
  /// Number of leading indices of degree <= d (graded-lex full bases only).
  Eigen::Index prefix_size(int d) const;

 private:
  friend GradedBasis monomial_basis(int, int, Ordering, bool);
  std::map<MultiIndex, Eigen::Index, GradedLexLess> lookup_;
};

/// All monomials of degree <= n (or == n when homogeneous) in N variables.
GradedBasis monomial_basis(int dim, int degree, Ordering ordering = Ordering::graded_lex,
                           bool homogeneous = false);

/// C(n, k) as an integer.
long long binomial(int n, int k);

/// Sparse multivariate polynomial; no zero coefficients are stored.
template <class T>
class Polynomial {
 public:
  using Scalar = T;
  using Terms = std::map<MultiIndex, T, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(int dim) : dim_(dim) {}

  static Polynomial constant(int dim, const T& c) {
    Polynomial p(dim);
    p.add_term(MultiIndex(dim), c);
    return p;
  }
  static Polynomial monomial(const MultiIndex& alpha, const T& c = T(1)) {
    Polynomial p(alpha.dim());
    p.add_term(alpha, c);
    return p;
  }
  static Polynomial variable(int dim, int i) { return monomial(MultiIndex::unit(dim, i)); }

  int dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  /// Highest total degree, -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  T coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? T(0) : it->second;
  }

  void add_term(const MultiIndex& alpha, const T& c) {
    check_dim(alpha.dim());
    if (scalar_traits<T>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(alpha, c);
    if (!inserted) {
      it->second += c;
      if (scalar_traits<T>::is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    adopt_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    adopt_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    if (scalar_traits<T>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= T(-1); }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out(a.dim_ ? a.dim_ : b.dim_);
    if (a.dim_ && b.dim_ && a.dim_ != b.dim_)
      throw Error(ErrorKind::dimension_mismatch, "polynomial product of different dimensions");
    for (const auto& [x, cx] : a.terms_)
      for (const auto& [y, cy] : b.terms_) out.add_term(x + y, cx * cy);
    return out;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  Polynomial derivative(int i) const {
    Polynomial out(dim_);
    for (const auto& [a, c] : terms_) {
      const int e = a[i];
      if (e == 0) continue;
      out.add_term(a.decremented(i), c * T(e));
    }
    return out;
  }

  Polynomial homogeneous_part(int n) const {
    Polynomial out(dim_);
    for (const auto& [a, c] : terms_)
      if (a.degree() == n) out.terms_.emplace(a, c);
    return out;
  }

  /// Drops terms with magnitude <= tol (float backends).
  Polynomial pruned(double tol) const {
    Polynomial out(dim_);
    for (const auto& [a, c] : terms_)
      if (scalar_traits<T>::magnitude(c) > tol) out.terms_.emplace(a, c);
    return out;
  }

  double max_coefficient() const {
    double m = 0.0;
    for (const auto& [a, c] : terms_) m = std::max(m, scalar_traits<T>::magnitude(c));
    return m;
  }

  template <class U>
  U evaluate(std::span<const U> x) const {
    check_dim(static_cast<int>(x.size()));
    U sum = U(0);
    for (const auto& [a, c] : terms_) {
      U term = scalar_cast<U>(c);
      for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < a[i]; ++k) term *= x[static_cast<std::size_t>(i)];
      sum += term;
    }
    return sum;
  }

  template <class U>
  Polynomial<U> cast() const {
    Polynomial<U> out(dim_);
    for (const auto& [a, c] : terms_) out.add_term(a, scalar_cast<U>(c));
    return out;
  }

 private:
  void check_dim(int d) const {
    if (dim_ != d) throw Error(ErrorKind::dimension_mismatch,
                               "expected dimension " + std::to_string(dim_) + ", got " + std::to_string(d));
  }
  void adopt_dim(const Polynomial& o) {
    if (dim_ == 0 && terms_.empty()) dim_ = o.dim_;
    if (o.dim_ != dim_) check_dim(o.dim_);
  }

  int dim_ = 0;
  Terms terms_;
};

/// Coefficient vector of p in `basis` (throws if p has a term outside it).
template <class T>
Vector<T> coordinates(const Polynomial<T>& p, const GradedBasis& basis) {
  Vector<T> v = Vector<T>::Constant(static_cast<Eigen::Index>(basis.size()), T(0));
  for (const auto& [a, c] : p.terms()) {
    const Eigen::Index pos = basis.position(a);
    if (pos < 0) throw Error(ErrorKind::dimension_mismatch, "polynomial has a term outside the basis");
    v(pos) = c;
  }
  return v;
}

template <class T, class Derived>
Polynomial<T> from_coordinates(const Eigen::MatrixBase<Derived>& v, const GradedBasis& basis) {
  Polynomial<T> p(basis.dim);
  for (Eigen::Index i = 0; i < v.size(); ++i) p.add_term(basis.indices[static_cast<std::size_t>(i)], v(i));
  return p;
}

/// Classical (physicists') Hermite polynomial H_k in one variable, integer coefficients.
std::vector<long long> hermite_coefficients(int k);

/// prod_i H_{k_i}(x_i): dilation 1, unnormalized, exact.
template <class T>
Polynomial<T> hermite_tensor(const MultiIndex& k) {
  const int n = k.dim();
  Polynomial<T> out = Polynomial<T>::constant(n, T(1));
  for (int i = 0; i < n; ++i) {
    const auto coeffs = hermite_coefficients(k[i]);
    Polynomial<T> factor(n);
    for (std::size_t p = 0; p < coeffs.size(); ++p) {
      if (coeffs[p] == 0) continue;
      MultiIndex alpha(n);
      for (std::size_t r = 0; r < p; ++r) alpha = alpha.incremented(i);
      factor.add_term(alpha, T(coeffs[p]));
    }
    out = out * factor;
  }
  return out;
}

/// prod_i H_{k_i}(x_i / delta_i). The dilated family is orthogonal under the centered
/// Gaussian with covariance diag(delta_i^2 / 2). With `normalized`, divides by
/// sqrt(2^|k| k!) so that the family is orthonormal there.
Polynomial<double> hermite_tensor(const MultiIndex& k, std::span<const double> dilations, bool normalized);

/// 2^|k| * prod k_i!, the squared L2 norm of the unnormalized H_k for weight pi^{-N/2} e^{-|x|^2}.
Rational hermite_norm_squared(const MultiIndex& k);

/// "4*x1^2 - 2"
template <class T>
std::string to_text(const Polynomial<T>& p);

}  // namespace ou
