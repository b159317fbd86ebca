#pragma once

#include <vector>

#include "ouspec/gaussian.hpp"
#include "ouspec/model.hpp"
#include "ouspec/polynomial.hpp"

namespace ou {

struct Tolerances {
  double eig = 1e-8;    ///< eigenvalue grouping, absolute
  double orth = 1e-9;   ///< normalized inner product verdicts
  double nilp = 1e-9;   ///< relative residual of (M - mu)^k u
  double rank = 1e-10;  ///< singular values below sigma_max * rank count as zero
  /// Singular values within [rank/band, rank*band] (relative) make the rank decision ambiguous.
  double band = 100.0;
};

/// Eigenvalues of B with multiplicity, conjugate pairs adjacent.
std::vector<Complex> drift_eigenvalues(const Eigen::MatrixXd& b);

struct SpectrumElement {
  Complex value;
  /// Exponent vectors (n_1..n_N) over the drift eigenvalues with sum n_j lambda_j = value.
  std::vector<std::vector<int>> witnesses;
  int multiplicity() const { return static_cast<int>(witnesses.size()); }
  int max_degree() const;
};

struct SpectrumSet {
  std::vector<Complex> drift;
  int degree_cap = 0;
  std::vector<SpectrumElement> elements;
};

/// {sum n_j lambda_j : sum n_j <= cap}, deduplicated within tol_eig. Multiplicities count
/// witnesses, so they add up to C(N + cap, N).
SpectrumSet spectrum(const Model& model, int degree_cap, double tol_eig = 1e-8);

struct EigenspaceGroup {
  Complex eigenvalue;
  std::vector<std::vector<int>> witnesses;
  int multiplicity = 0;       ///< dimension of the generalized eigenspace
  int nilpotency_index = 0;   ///< least k with stabilized ker (M - mu)^k
  double residual = 0.0;      ///< max relative |(M - mu)^k u|
  std::vector<Polynomial<Complex>> basis;
};

struct SpectralDecomposition {
  int degree_cap = 0;
  GradedBasis basis;
  Tolerances tolerances;
  std::vector<EigenspaceGroup> groups;
};

/// Generalized eigenspaces of L on polynomials of degree <= cap.
///
/// Candidate eigenvalues come from spectrum(); for each one the kernels of (M - mu)^k are
/// grown one power at a time (ker^{k+1} = ker of P_k^perp (M - mu)) on the invariant
/// subspace of degree <= the largest witness degree. A group whose stabilized kernel
/// dimension differs from the witness count throws RankDecisionAmbiguous.
SpectralDecomposition generalized_eigenspaces(const Model& model, int degree_cap, const Tolerances& tol = {},
                                              Execution execution = Execution::parallel);

struct PairVerdict {
  std::size_t first = 0;
  std::size_t second = 0;
  double max_normalized = 0.0;  ///< max |<u,v>| / (|u| |v|) over basis pairs
  bool orthogonal = true;
  Eigen::MatrixXcd gram;        ///< <u_i, v_j>
};

struct OrthogonalityReport {
  double tol = 0.0;
  std::vector<PairVerdict> pairs;
  bool orthogonal = true;
  /// max over mu != 0 groups of |<1, u>| / |u|
  double max_mean = 0.0;
};

OrthogonalityReport orthogonality_report(const SpectralDecomposition& dec, const Eigen::MatrixXd& sigma,
                                         double tol_orth = 1e-9);

/// Closed-form eigenspace group with exact coefficients.
struct ExactGroup {
  Rational eigenvalue;
  std::vector<Polynomial<Rational>> basis;
};

struct ExactPairVerdict {
  std::size_t first = 0;
  std::size_t second = 0;
  RationalMatrix gram;
  bool orthogonal = true;  ///< every entry exactly zero
};

struct ExactOrthogonalityReport {
  std::vector<ExactPairVerdict> pairs;
  bool orthogonal = true;
};

ExactOrthogonalityReport exact_orthogonality_report(const std::vector<ExactGroup>& groups, const RationalMatrix& sigma);

/// Basis of the degree-n Hermite space of N(0, Sigma): each degree-n monomial minus its
/// L2 projection onto polynomials of degree < n. Exact.
std::vector<Polynomial<Rational>> hermite_space_basis(const RationalMatrix& sigma, int degree);

/// Angle in [0, pi/2] between the two real eigenvector lines of a 2x2 B.
/// Throws ComplexSpectrumFlag or RepeatedEigenvalue.
double b_eigenvector_angle(const Eigen::MatrixXd& b, double tol = 1e-10);

}  // namespace ou
