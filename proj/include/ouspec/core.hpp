#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

namespace ou {

/// Exact rational scalar (GMP backed, expression templates off so `auto` is safe).
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Complex = std::complex<double>;

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using RationalMatrix = Matrix<Rational>;

enum class ErrorKind {
  not_symmetric,
  not_positive_definite,
  not_hurwitz,
  singular_system,
  dimension_mismatch,
  basis_unavailable,
  not_normalized,
  unsupported_dimension,
  convergence_failure,
  rank_decision_ambiguous,
  repeated_eigenvalue,
  complex_spectrum,
  cholesky_failure,
  invalid_params,
  schema_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The diagnostic without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

/// Per-scalar behaviour needed by the polynomial and moment code.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  using real = Rational;
  static constexpr bool exact = true;
  static bool is_zero(const Rational& v) { return v == 0; }
  static Rational conj(const Rational& v) { return v; }
  static Complex to_complex(const Rational& v) { return {v.convert_to<double>(), 0.0}; }
  static double magnitude(const Rational& v) { return abs(v).convert_to<double>(); }
};

template <>
struct scalar_traits<double> {
  using real = double;
  static constexpr bool exact = false;
  static bool is_zero(double v) { return v == 0.0; }
  static double conj(double v) { return v; }
  static Complex to_complex(double v) { return {v, 0.0}; }
  static double magnitude(double v) { return std::abs(v); }
};

template <>
struct scalar_traits<Complex> {
  using real = double;
  static constexpr bool exact = false;
  static bool is_zero(const Complex& v) { return v == Complex(0.0, 0.0); }
  static Complex conj(const Complex& v) { return std::conj(v); }
  static Complex to_complex(const Complex& v) { return v; }
  static double magnitude(const Complex& v) { return std::abs(v); }
};

template <class T>
using real_t = typename scalar_traits<T>::real;

/// Lossy conversion between scalar backends (rational -> float, real -> complex).
template <class To, class From>
To scalar_cast(const From& v) {
  if constexpr (std::is_same_v<To, From>) {
    return v;
  } else if constexpr (std::is_same_v<From, Rational>) {
    return To(v.template convert_to<double>());
  } else if constexpr (std::is_same_v<To, Complex>) {
    return Complex(v);
  } else {
    static_assert(std::is_same_v<From, To>, "unsupported scalar conversion");
  }
}

template <class To, class From>
Matrix<To> matrix_cast(const Matrix<From>& m) {
  Matrix<To> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = scalar_cast<To>(m(i, j));
  return out;
}

/// "p/q" (or "p" for integers).
std::string to_string(const Rational& v);

/// Accepts "p/q", integers and plain decimals such as "-0.125" or "2.5e-1".
Rational parse_rational(const std::string& text);

/// Exact conversion of the shortest round-trip decimal representation of `v`.
Rational rational_from_double(double v);

}  // namespace ou
