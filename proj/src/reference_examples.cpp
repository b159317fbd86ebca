#include "ouspec/reference_examples.hpp"

#include <cmath>

namespace ou::reference {

Model rotation_model() {
  RationalMatrix q = RationalMatrix::Identity(2, 2);
  RationalMatrix b(2, 2);
  b << -1, 1, -1, -1;
  return Model::validate(q, b);
}

void check(const TriangularParams& p) {
  if (!(p.d > 0)) throw Error(ErrorKind::invalid_params, "d > 0 violated (d = " + to_string(p.d) + ")");
  if (!(p.a > p.d))
    throw Error(ErrorKind::invalid_params, "a > d violated (a = " + to_string(p.a) + ", d = " + to_string(p.d) + ")");
  if (p.c == 0) throw Error(ErrorKind::invalid_params, "c != 0 violated");
}

Model triangular_model(const TriangularParams& p) {
  check(p);
  RationalMatrix q = RationalMatrix::Identity(2, 2);
  RationalMatrix b(2, 2);
  b << -p.a + p.d, 0, p.c, -p.a - p.d;
  return Model::validate(q, b);
}

namespace {

Polynomial<Rational> term(int e1, int e2, const Rational& c) { return Polynomial<Rational>::monomial(MultiIndex({e1, e2}), c); }

}  // namespace

std::vector<Eigenpair> triangular_eigenfunctions(const TriangularParams& p) {
  check(p);
  const Rational& a = p.a;
  const Rational& d = p.d;
  const Rational& c = p.c;
  std::vector<Eigenpair> out;
  out.push_back({"v1", term(2, 0, 1) + term(0, 0, -Rational(1) / (2 * (a - d))), -2 * (a - d)});
  out.push_back({"v2", term(2, 0, 1) + term(1, 1, -2 * d / c) + term(0, 0, -Rational(1) / (2 * a)), -2 * a});
  out.push_back({"v3",
                 term(2, 0, 1) + term(1, 1, -4 * d / c) + term(0, 2, 4 * d * d / (c * c)) +
                     term(0, 0, -(c * c + 4 * d * d) / (2 * c * c * (a + d))),
                 -2 * (a + d)});
  if (2 * d == a)
    out.push_back({"v4", term(4, 0, 1) + term(2, 0, -6 / a) + term(0, 0, 3 / (a * a)), -2 * a});
  return out;
}

RationalMatrix triangular_stationary_covariance(const TriangularParams& p) {
  check(p);
  const Rational& a = p.a;
  const Rational& d = p.d;
  const Rational& c = p.c;
  RationalMatrix s(2, 2);
  s(0, 0) = Rational(1) / (2 * (a - d));
  s(0, 1) = s(1, 0) = c / (4 * a * (a - d));
  s(1, 1) = c * c / (4 * a * (a - d) * (a + d)) + Rational(1) / (2 * (a + d));
  return s;
}

CoordinateChange triangular_whitening(const TriangularParams& p) {
  check(p);
  const double a = p.a.convert_to<double>();
  const double d = p.d.convert_to<double>();
  const double c = p.c.convert_to<double>();
  const double s = std::sqrt((a + d) / (c * c + 4 * a * a));
  Eigen::MatrixXd h(2, 2);
  h << std::sqrt(a - d), 0.0, -c * s, 2 * a * s;
  return CoordinateChange::from(h, ChangeKind::general_linear);
}

}  // namespace ou::reference
