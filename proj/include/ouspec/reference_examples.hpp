#pragma once

#include <vector>

#include "ouspec/model.hpp"
#include "ouspec/polynomial.hpp"

// The two planar reference models:
//  - rotation model: Q = I, B = [[-1, 1], [-1, -1]] (eigenvalues -1 +- i), whose
//    generalized eigenspaces are orthogonal although B has two eigenvalues;
//  - triangular model: Q = I, B = [[-a+d, 0], [c, -a-d]] with a > d > 0, c != 0, whose
//    quadratic eigenfunctions are pairwise non-orthogonal.
namespace ou::reference {

Model rotation_model();

struct TriangularParams {
  Rational a;
  Rational d;
  Rational c;
};

/// Throws InvalidParams naming the violated constraint.
void check(const TriangularParams& p);

Model triangular_model(const TriangularParams& p);

struct Eigenpair {
  std::string name;
  Polynomial<Rational> function;
  Rational eigenvalue;
};

/// v1, v2, v3 with eigenvalues -2(a-d), -2a, -2(a+d); plus v4 at -2a when d = a/2.
std::vector<Eigenpair> triangular_eigenfunctions(const TriangularParams& p);

/// Closed-form stationary covariance of the triangular model.
RationalMatrix triangular_stationary_covariance(const TriangularParams& p);

/// z1 = sqrt(a-d) x1, z2 = sqrt((a+d)/(c^2+4a^2)) (2a x2 - c x1); maps the stationary
/// law to covariance I/2.
CoordinateChange triangular_whitening(const TriangularParams& p);

}  // namespace ou::reference
