#include "ouspec/core.hpp"

#include <charconv>
#include <cctype>

namespace ou {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_symmetric: return "NotSymmetric";
    case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
    case ErrorKind::not_hurwitz: return "NotHurwitz";
    case ErrorKind::singular_system: return "SingularSystem";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::basis_unavailable: return "BasisUnavailable";
    case ErrorKind::not_normalized: return "NotNormalized";
    case ErrorKind::unsupported_dimension: return "UnsupportedDimension";
    case ErrorKind::convergence_failure: return "ConvergenceFailure";
    case ErrorKind::rank_decision_ambiguous: return "RankDecisionAmbiguous";
    case ErrorKind::repeated_eigenvalue: return "RepeatedEigenvalue";
    case ErrorKind::complex_spectrum: return "ComplexSpectrumFlag";
    case ErrorKind::cholesky_failure: return "CholeskyFailure";
    case ErrorKind::invalid_params: return "InvalidParams";
    case ErrorKind::schema_error: return "SchemaError";
  }
  return "Unknown";
}

std::string to_string(const Rational& v) {
  const auto num = numerator(v);
  const auto den = denominator(v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace {

Rational pow10(int e) {
  Rational r = 1;
  for (int i = 0; i < std::abs(e); ++i) r *= 10;
  return e < 0 ? Rational(1) / r : r;
}

// [+-]digits[.digits][(e|E)[+-]digits]
bool parse_decimal(const std::string& s, Rational& out) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) negative = s[pos++] == '-';
  boost::multiprecision::mpz_int mantissa = 0;
  int scale = 0;
  bool any_digit = false;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    mantissa = mantissa * 10 + (s[pos++] - '0');
    any_digit = true;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      mantissa = mantissa * 10 + (s[pos++] - '0');
      --scale;
      any_digit = true;
    }
  }
  if (!any_digit) return false;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    int exponent = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), exponent);
    if (ec != std::errc() || ptr != s.data() + s.size()) return false;
    scale += exponent;
    pos = s.size();
  }
  if (pos != s.size()) return false;
  out = Rational(mantissa) * pow10(scale);
  if (negative) out = -out;
  return true;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    Rational r;
    if (!parse_decimal(s, r)) throw Error(ErrorKind::schema_error, "not a rational number: '" + text + "'");
    return r;
  }
  Rational num, den;
  if (!parse_decimal(trim(s.substr(0, slash)), num) || !parse_decimal(trim(s.substr(slash + 1)), den))
    throw Error(ErrorKind::schema_error, "not a rational number: '" + text + "'");
  if (den == 0) throw Error(ErrorKind::schema_error, "zero denominator in '" + text + "'");
  return num / den;
}

Rational rational_from_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(ErrorKind::schema_error, "cannot format floating value");
  return parse_rational(std::string(buf, ptr));
}

}  // namespace ou
