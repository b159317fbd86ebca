#include "ouspec/polynomial.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ou {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw Error(ErrorKind::dimension_mismatch, "negative exponent in multi-index");
    degree_ += e;
  }
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (dim() != other.dim()) throw Error(ErrorKind::dimension_mismatch, "multi-index dimensions differ");
  MultiIndex out(*this);
  for (std::size_t i = 0; i < exponents_.size(); ++i) out.exponents_[i] += other.exponents_[i];
  out.degree_ += other.degree_;
  return out;
}

MultiIndex MultiIndex::incremented(int i) const {
  MultiIndex out(*this);
  ++out.exponents_[static_cast<std::size_t>(i)];
  ++out.degree_;
  return out;
}

MultiIndex MultiIndex::decremented(int i) const {
  MultiIndex out(*this);
  auto& e = out.exponents_[static_cast<std::size_t>(i)];
  if (e == 0) throw Error(ErrorKind::dimension_mismatch, "exponent would become negative");
  --e;
  --out.degree_;
  return out;
}

MultiIndex MultiIndex::shifted(int up, int down) const {
  if (up == down) return *this;
  return decremented(down).incremented(up);
}

int v_order(const MultiIndex& alpha) {
  int v = 0;
  for (int j = 0; j < alpha.dim(); ++j) v += (j + 1) * alpha[j];
  return v;
}

MultiIndex jordan_shift(const MultiIndex& alpha, int i) {
  if (i < 1 || i >= alpha.dim())
    throw Error(ErrorKind::dimension_mismatch, "jordan_shift needs 1 <= i < N");
  return alpha.shifted(i - 1, i);
}

Eigen::Index GradedBasis::position(const MultiIndex& alpha) const {
  auto it = lookup_.find(alpha);
  return it == lookup_.end() ? -1 : it->second;
}

Eigen::Index GradedBasis::prefix_size(int d) const {
  Eigen::Index count = 0;
  for (const auto& a : indices) {
    if (a.degree() > d) break;
    ++count;
  }
  return count;
}

namespace {

// Compositions of `remaining` into the coordinates [pos, N), first coordinate descending.
void compositions(std::vector<int>& current, std::size_t pos, int remaining, std::vector<MultiIndex>& out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[pos] = e;
    compositions(current, pos + 1, remaining - e, out);
  }
}

}  // namespace

GradedBasis monomial_basis(int dim, int degree, Ordering ordering, bool homogeneous) {
  if (dim < 1 || degree < 0) throw Error(ErrorKind::dimension_mismatch, "monomial_basis needs N >= 1, n >= 0");
  GradedBasis basis;
  basis.dim = dim;
  basis.degree = degree;
  basis.ordering = ordering;
  basis.homogeneous = homogeneous;
  std::vector<int> current(static_cast<std::size_t>(dim), 0);
  for (int d = homogeneous ? degree : 0; d <= degree; ++d) compositions(current, 0, d, basis.indices);
  if (ordering == Ordering::v_nondecreasing) {
    // graded-lex ties; the enumeration above is already graded-lex
    std::stable_sort(basis.indices.begin(), basis.indices.end(),
                     [](const MultiIndex& a, const MultiIndex& b) { return v_order(a) < v_order(b); });
  }
  for (std::size_t i = 0; i < basis.indices.size(); ++i)
    basis.lookup_.emplace(basis.indices[i], static_cast<Eigen::Index>(i));
  return basis;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<long long> hermite_coefficients(int k) {
  // H_{m+1} = 2x H_m - 2m H_{m-1}
  std::vector<long long> prev{1};
  if (k == 0) return prev;
  std::vector<long long> cur{0, 2};
  for (int m = 1; m < k; ++m) {
    std::vector<long long> next(static_cast<std::size_t>(m) + 2, 0);
    for (std::size_t p = 0; p < cur.size(); ++p) next[p + 1] += 2 * cur[p];
    for (std::size_t p = 0; p < prev.size(); ++p) next[p] -= 2LL * m * prev[p];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

Polynomial<double> hermite_tensor(const MultiIndex& k, std::span<const double> dilations, bool normalized) {
  const int n = k.dim();
  if (static_cast<int>(dilations.size()) != n)
    throw Error(ErrorKind::dimension_mismatch, "one dilation per coordinate required");
  Polynomial<double> out = Polynomial<double>::constant(n, 1.0);
  for (int i = 0; i < n; ++i) {
    const double delta = dilations[static_cast<std::size_t>(i)];
    if (!(delta > 0.0)) throw Error(ErrorKind::invalid_params, "dilations must be strictly positive");
    const auto coeffs = hermite_coefficients(k[i]);
    Polynomial<double> factor(n);
    MultiIndex alpha(n);
    for (std::size_t p = 0; p < coeffs.size(); ++p) {
      if (coeffs[p] != 0) factor.add_term(alpha, static_cast<double>(coeffs[p]) / std::pow(delta, static_cast<double>(p)));
      alpha = alpha.incremented(i);
    }
    out = out * factor;
  }
  if (normalized) out *= 1.0 / std::sqrt(hermite_norm_squared(k).convert_to<double>());
  return out;
}

Rational hermite_norm_squared(const MultiIndex& k) {
  Rational r = 1;
  for (int i = 0; i < k.dim(); ++i)
    for (int m = 1; m <= k[i]; ++m) r *= 2 * m;
  return r;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

// Returns (negative, magnitude text, is_one).
struct Formatted {
  bool negative;
  std::string text;
  bool one;
};

Formatted format_coefficient(const Rational& c) {
  return {c < 0, to_string(abs(c)), abs(c) == 1};
}
Formatted format_coefficient(double c) {
  return {std::signbit(c), format_double(std::abs(c)), std::abs(c) == 1.0};
}
Formatted format_coefficient(const Complex& c) {
  if (c.imag() == 0.0) return format_coefficient(c.real());
  if (c.real() == 0.0) {
    auto f = format_coefficient(c.imag());
    f.text += "i";
    f.one = false;
    return f;
  }
  std::string im = format_double(std::abs(c.imag()));
  return {false, "(" + format_double(c.real()) + (c.imag() < 0 ? "-" : "+") + im + "i)", false};
}

}  // namespace

template <class T>
std::string to_text(const Polynomial<T>& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [alpha, c] = *it;
    const Formatted f = format_coefficient(c);
    if (first) {
      if (f.negative) os << "-";
    } else {
      os << (f.negative ? " - " : " + ");
    }
    first = false;
    std::string mono;
    for (int i = 0; i < alpha.dim(); ++i) {
      if (alpha[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1);
      if (alpha[i] > 1) mono += "^" + std::to_string(alpha[i]);
    }
    if (mono.empty()) {
      os << f.text;
    } else if (f.one) {
      os << mono;
    } else {
      os << f.text << "*" << mono;
    }
  }
  return os.str();
}

template std::string to_text(const Polynomial<Rational>&);
template std::string to_text(const Polynomial<double>&);
template std::string to_text(const Polynomial<Complex>&);

}  // namespace ou
