#include <gtest/gtest.h>

#include <numbers>

#include "ouspec/operator.hpp"
#include "ouspec/reference_examples.hpp"
#include "ouspec/spectral.hpp"

using namespace ou;

namespace {

Model jordan_model(int n, double lambda) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n) * lambda;
  for (int i = 1; i < n; ++i) b(i, i - 1) = 1.0;
  return Model::validate(Eigen::MatrixXd::Identity(n, n), b);
}

int total_multiplicity(const SpectrumSet& s) {
  int total = 0;
  for (const auto& e : s.elements) total += e.multiplicity();
  return total;
}

}  // namespace

TEST(Spectrum, CapZeroIsOnlyZero) {
  const SpectrumSet s = spectrum(reference::rotation_model(), 0);
  ASSERT_EQ(s.elements.size(), 1u);
  EXPECT_EQ(s.elements[0].value, Complex(0.0, 0.0));
}

TEST(Spectrum, MultiplicitiesSumToPolynomialSpaceDimension) {
  for (int cap = 0; cap <= 5; ++cap) {
    EXPECT_EQ(total_multiplicity(spectrum(reference::rotation_model(), cap)), binomial(2 + cap, 2));
    EXPECT_EQ(total_multiplicity(spectrum(jordan_model(3, -2.0), cap)), binomial(3 + cap, 3));
  }
}

TEST(Spectrum, RotationModelAtCapTwo) {
  const SpectrumSet s = spectrum(reference::rotation_model(), 2);
  std::vector<Complex> expected{{0, 0}, {-1, 1}, {-1, -1}, {-2, 0}, {-2, 2}, {-2, -2}};
  ASSERT_EQ(s.elements.size(), expected.size());
  for (const auto& z : expected) {
    const bool found = std::any_of(s.elements.begin(), s.elements.end(),
                                   [&](const SpectrumElement& e) { return std::abs(e.value - z) < 1e-12; });
    EXPECT_TRUE(found) << z;
  }
}

TEST(Spectrum, TriangularModelAtCapTwo) {
  const SpectrumSet s = spectrum(reference::triangular_model({2, 1, 1}), 2);
  std::vector<double> values;
  for (const auto& e : s.elements) values.push_back(e.value.real());
  std::sort(values.begin(), values.end());
  EXPECT_EQ(values, (std::vector<double>{-6, -4, -3, -2, -1, 0}));
}

TEST(Eigenspaces, DimensionsMatchWitnessCounts) {
  const Model m = reference::triangular_model({2, 1, 1});
  const SpectralDecomposition dec = generalized_eigenspaces(m, 4);
  std::size_t total = 0;
  for (const auto& g : dec.groups) {
    EXPECT_EQ(static_cast<int>(g.basis.size()), g.multiplicity);
    EXPECT_EQ(g.multiplicity, static_cast<int>(g.witnesses.size()));
    EXPECT_LE(g.residual, dec.tolerances.nilp);
    total += g.basis.size();
  }
  EXPECT_EQ(total, dec.basis.size());
}

TEST(Eigenspaces, ZeroEigenvalueHoldsOnlyConstants) {
  for (const Model& m : {reference::rotation_model(), reference::triangular_model({3, 1, 2}), jordan_model(2, -1.0)}) {
    const SpectralDecomposition dec = generalized_eigenspaces(m, 4);
    int zero_groups = 0;
    for (const auto& g : dec.groups)
      if (std::abs(g.eigenvalue) < 1e-9) {
        ++zero_groups;
        ASSERT_EQ(g.basis.size(), 1u);
        EXPECT_EQ(g.basis[0].degree(), 0);
      }
    EXPECT_EQ(zero_groups, 1);
    int total = 0;
    for (const auto& g : dec.groups) total += static_cast<int>(g.basis.size());
    EXPECT_EQ(total, binomial(m.dim() + 4, m.dim()));
  }
}

TEST(Eigenspaces, BasisVectorsAreGeneralizedEigenfunctions) {
  const Model m = jordan_model(2, -1.0);
  const SpectralDecomposition dec = generalized_eigenspaces(m, 4);
  for (const auto& g : dec.groups)
    for (const auto& u : g.basis) {
      Polynomial<Complex> w = u;
      for (int k = 0; k < g.nilpotency_index; ++k) w = apply_L(m, w) - w * g.eigenvalue;
      EXPECT_LT(w.max_coefficient(), 1e-9 * std::max(1.0, u.max_coefficient()));
    }
}

TEST(Eigenspaces, JordanDriftGivesNontrivialNilpotency) {
  const SpectralDecomposition dec = generalized_eigenspaces(jordan_model(2, -1.0), 3);
  int max_index = 0;
  for (const auto& g : dec.groups) max_index = std::max(max_index, g.nilpotency_index);
  EXPECT_GE(max_index, 2);
}

TEST(Eigenspaces, SerialAndParallelAgree) {
  const Model m = reference::rotation_model();
  const auto s = generalized_eigenspaces(m, 4, {}, Execution::serial);
  const auto p = generalized_eigenspaces(m, 4, {}, Execution::parallel);
  ASSERT_EQ(s.groups.size(), p.groups.size());
  for (std::size_t i = 0; i < s.groups.size(); ++i) {
    ASSERT_EQ(s.groups[i].basis.size(), p.groups[i].basis.size());
    for (std::size_t k = 0; k < s.groups[i].basis.size(); ++k)
      EXPECT_TRUE(s.groups[i].basis[k] == p.groups[i].basis[k]);
  }
}

TEST(Eigenspaces, CanonicalFormReproducesClosedFormEigenfunction) {
  const reference::TriangularParams p{2, 1, 1};
  const SpectralDecomposition dec = generalized_eigenspaces(reference::triangular_model(p), 2);
  const auto v3 = reference::triangular_eigenfunctions(p)[2].function.cast<Complex>();
  bool found = false;
  for (const auto& g : dec.groups)
    if (std::abs(g.eigenvalue - Complex(-6, 0)) < 1e-9) {
      ASSERT_EQ(g.basis.size(), 1u);
      EXPECT_LT((g.basis[0] - v3).max_coefficient(), 1e-10);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(Eigenspaces, NearlyCoincidentEigenvaluesAreAmbiguous) {
  Eigen::MatrixXd b(2, 2);
  b << -1.0, 0.0, 0.0, -1.0 - 3e-9;
  const Model m = Model::validate(Eigen::MatrixXd::Identity(2, 2), b);
  try {
    generalized_eigenspaces(m, 1);
    FAIL() << "expected RankDecisionAmbiguous";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::rank_decision_ambiguous);
  }
}

TEST(Orthogonality, RotationModelIsOrthogonal) {
  const Model m = reference::rotation_model();
  const auto dec = generalized_eigenspaces(m, 4);
  const auto rep = orthogonality_report(dec, solve_lyapunov(m).sigma);
  EXPECT_TRUE(rep.orthogonal);
  EXPECT_LT(rep.max_mean, 1e-10);
}

TEST(Orthogonality, TriangularModelIsNotOrthogonal) {
  const Model m = reference::triangular_model({2, 1, 1});
  const auto dec = generalized_eigenspaces(m, 2);
  const auto rep = orthogonality_report(dec, solve_lyapunov(m).sigma);
  EXPECT_FALSE(rep.orthogonal);
  EXPECT_LT(rep.max_mean, 1e-10);
}

TEST(Orthogonality, ExactHermiteSpacesAreOrthogonal) {
  RationalMatrix sigma(2, 2);
  sigma << Rational(1, 2), Rational(1, 8), Rational(1, 8), Rational(5, 24);
  std::vector<ExactGroup> groups;
  for (int n = 0; n <= 4; ++n) groups.push_back({Rational(-n), hermite_space_basis(sigma, n)});
  EXPECT_EQ(groups[3].basis.size(), 4u);
  const auto rep = exact_orthogonality_report(groups, sigma);
  EXPECT_TRUE(rep.orthogonal);
  EXPECT_EQ(rep.pairs.size(), 10u);
}

TEST(EigenvectorAngle, SymmetricDriftIsPerpendicular) {
  Eigen::MatrixXd b(2, 2);
  b << -2, 0.5, 0.5, -1;
  EXPECT_NEAR(b_eigenvector_angle(b), std::numbers::pi / 2, 1e-12);
}

TEST(EigenvectorAngle, TriangularDriftIsOblique) {
  Eigen::MatrixXd b(2, 2);
  b << -1, 0, 1, -3;
  // eigenvectors (1, 1/2) and (0, 1)
  EXPECT_NEAR(b_eigenvector_angle(b), std::atan(2.0), 1e-12);
}

TEST(EigenvectorAngle, RejectsComplexAndRepeatedSpectra) {
  Eigen::MatrixXd rot(2, 2);
  rot << -1, 1, -1, -1;
  Eigen::MatrixXd rep(2, 2);
  rep << -1, 0, 1, -1;
  try {
    b_eigenvector_angle(rot);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::complex_spectrum);
  }
  try {
    b_eigenvector_angle(rep);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::repeated_eigenvalue);
  }
}
