#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "ouspec/reference_examples.hpp"
#include "ouspec/simulate.hpp"

using namespace ou;

namespace {

Model model_211() { return reference::triangular_model({2, 1, 1}).as_float(); }

std::vector<double> column(const Ensemble& e, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(e.samples.rows()));
  for (Eigen::Index i = 0; i < e.samples.rows(); ++i) out[static_cast<std::size_t>(i)] = e.samples(i, j);
  return out;
}

}  // namespace

TEST(Simulate, SerialAndParallelEnsemblesAreIdentical) {
  const SimConfig cfg{0.1, 0, 2000, 42};
  const Ensemble s = kernels::ensemble_serial(model_211(), cfg);
  const Ensemble p = kernels::ensemble_parallel(model_211(), cfg);
  EXPECT_EQ(s.samples, p.samples);
  EXPECT_EQ(s.config_hash, p.config_hash);
}

TEST(Simulate, SeedChangesTheStream) {
  const Ensemble a = stationary_ensemble(model_211(), {0.1, 0, 100, 1});
  const Ensemble b = stationary_ensemble(model_211(), {0.1, 0, 100, 2});
  EXPECT_NE(a.samples, b.samples);
  EXPECT_NE(a.config_hash, b.config_hash);
}

TEST(Simulate, DefaultBurnInReachesDecayTarget) {
  const Model m = model_211();
  const long long steps = default_burn_in(m, 0.1);
  const auto norm2 = [&](long long k) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(oracle::taylor_exp(m.b(), 0.1 * k)).singularValues()(0);
  };
  EXPECT_LT(norm2(steps), 1e-6);
  EXPECT_GE(norm2(steps - 1), 1e-6);
}

TEST(Simulate, TransitionMatchesExactMoments) {
  const Model m = model_211();
  const TransitionSampler step(m, 0.5);
  EXPECT_LT((step.propagator() - oracle::taylor_exp(m.b(), 0.5)).cwiseAbs().maxCoeff(), 1e-13);
  const Eigen::MatrixXd qh = step.noise_factor() * step.noise_factor().transpose();
  EXPECT_LT((qh - oracle::simpson_covariance(m.q(), m.b(), 0.5, 400)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Simulate, StationaryMarginalPassesKolmogorovSmirnov) {
  const Model m = model_211();
  const Ensemble e = stationary_ensemble(m, {0.1, 0, 20000, 7});
  const Eigen::MatrixXd cov = solve_lyapunov(m).sigma;
  for (Eigen::Index j = 0; j < 2; ++j)
    EXPECT_LT(oracle::ks_statistic(column(e, j), cov(j, j)), oracle::ks_critical_001(20000)) << j;
}

TEST(Simulate, OneStepLawPassesKolmogorovSmirnov) {
  const Model m = model_211();
  const double step = 0.3;
  const TransitionSampler sampler(m, step);
  const Eigen::Vector2d x0(1.5, -0.7);
  const Eigen::VectorXd mean = oracle::taylor_exp(m.b(), step) * x0;
  const Eigen::MatrixXd cov = oracle::simpson_covariance(m.q(), m.b(), step, 400);
  std::mt19937_64 rng(11);
  const int n = 10000;
  std::vector<std::vector<double>> cols(2, std::vector<double>(n));
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd x = sampler(x0, rng);
    for (int j = 0; j < 2; ++j) cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = x(j) - mean(j);
  }
  for (int j = 0; j < 2; ++j)
    EXPECT_LT(oracle::ks_statistic(cols[static_cast<std::size_t>(j)], cov(j, j)), oracle::ks_critical_001(n)) << j;
}

TEST(Simulate, PairingErrorHalvesWhenPathsQuadruple) {
  const Model m = model_211();
  const auto x1 = Polynomial<double>::variable(2, 0);
  const auto x2 = Polynomial<double>::variable(2, 1);
  const PairingEstimate small = estimate_pairing(stationary_ensemble(m, {0.1, 0, 5000, 21}), x1 * x1, x2 * x2);
  const PairingEstimate large = estimate_pairing(stationary_ensemble(m, {0.1, 0, 20000, 22}), x1 * x1, x2 * x2);
  const double ratio = small.standard_error / large.standard_error;
  EXPECT_GT(ratio, 1.6);
  EXPECT_LT(ratio, 2.4);
}

TEST(Simulate, EmpiricalCovarianceNearStationary) {
  const Model m = model_211();
  const Ensemble e = stationary_ensemble(m, {0.1, 0, 50000, 3});
  const Eigen::MatrixXd cov = solve_lyapunov(m).sigma;
  EXPECT_LT(((empirical_covariance(e) - cov).array() / cov.array()).abs().maxCoeff(), 0.05);
  EXPECT_LT(empirical_mean(e).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Simulate, PairingEstimateHasJackknifeError) {
  Ensemble e;
  e.samples.resize(4, 1);
  e.samples << 1, 2, 3, 4;
  const auto x = Polynomial<double>::variable(1, 0);
  const auto one = Polynomial<double>::constant(1, 1.0);
  const PairingEstimate est = estimate_pairing(e, x, one);
  EXPECT_DOUBLE_EQ(est.estimate, 2.5);
  // jackknife SE of the mean equals s / sqrt(n)
  EXPECT_NEAR(est.standard_error, std::sqrt((1.25 * 4 / 3) / 4), 1e-14);
}

TEST(Simulate, PairwiseSumIsAccurate) {
  std::vector<double> v(1 << 20, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 0.1 * (1 << 20), 1e-9);
}

TEST(Simulate, BinaryRoundTripWithSidecar) {
  const Model m = model_211();
  const SimConfig cfg{0.2, 5, 17, 9};
  const Ensemble e = stationary_ensemble(m, cfg);
  const std::filesystem::path path = std::filesystem::path(OU_TEST_TMPDIR) / "ensemble.bin";
  write_ensemble_binary(e, m, cfg, path);
  EXPECT_EQ(std::filesystem::file_size(path), 17u * 2u * 8u);
  const Ensemble back = read_ensemble_binary(path);
  EXPECT_EQ(back.samples, e.samples);
  EXPECT_EQ(back.burn_in, 5);
  EXPECT_EQ(back.config_hash, e.config_hash);
}

TEST(Simulate, RejectsBadConfiguration) {
  EXPECT_THROW(stationary_ensemble(model_211(), {0.0, 0, 10, 0}), Error);
  EXPECT_THROW(stationary_ensemble(model_211(), {0.1, 0, 0, 0}), Error);
  EXPECT_THROW(stationary_ensemble(model_211(), {0.1, -1, 10, 0}), Error);
}
