#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "ouspec/gaussian.hpp"
#include "ouspec/model.hpp"
#include "ouspec/polynomial.hpp"

namespace ou {

struct SimConfig {
  double step = 0.1;          ///< h > 0
  long long burn_in = 0;      ///< steps; 0 picks the smallest m with |e^{mhB}|_2 < 1e-6
  long long paths = 100000;
  std::uint64_t seed = 0;
};

using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Ensemble {
  SampleMatrix samples;  ///< paths x N
  long long burn_in = 0;
  std::uint64_t config_hash = 0;
};

/// One exact transition step: x -> e^{hB} x + chol(Q_h) xi.
class TransitionSampler {
 public:
  TransitionSampler(const Model& model, double step);

  const Eigen::MatrixXd& propagator() const { return propagator_; }
  const Eigen::MatrixXd& noise_factor() const { return noise_factor_; }

  template <class Rng>
  Eigen::VectorXd operator()(const Eigen::VectorXd& x, Rng& rng) const {
    std::normal_distribution<double> normal;
    Eigen::VectorXd xi(x.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
    return propagator_ * x + noise_factor_ * xi;
  }

 private:
  Eigen::MatrixXd propagator_;
  Eigen::MatrixXd noise_factor_;
};

/// Free-function form of a single step.
template <class Rng>
Eigen::VectorXd sample_transition(const Model& model, double step, const Eigen::VectorXd& x, Rng& rng) {
  return TransitionSampler(model, step)(x, rng);
}

/// Independent per-path stream derived from (seed, path) by SplitMix64 mixing.
std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path);

/// Smallest m >= 1 with |e^{m h B}|_2 < 1e-6.
long long default_burn_in(const Model& model, double step);

std::uint64_t config_hash(const Model& model, const SimConfig& config);

namespace kernels {
Ensemble ensemble_serial(const Model& model, const SimConfig& config);
Ensemble ensemble_parallel(const Model& model, const SimConfig& config);
}  // namespace kernels

/// Paths started at 0 and advanced burn_in exact steps; the rows are approximately
/// stationary. Output is identical for any worker count.
Ensemble stationary_ensemble(const Model& model, const SimConfig& config, Execution execution = Execution::parallel);

struct PairingEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Sample mean of p(x) q(x) with its jackknife standard error.
PairingEstimate estimate_pairing(const Ensemble& ensemble, const Polynomial<double>& p, const Polynomial<double>& q);

/// Pairwise summation in index order.
double pairwise_sum(std::span<const double> values);

Eigen::MatrixXd empirical_covariance(const Ensemble& ensemble);
Eigen::VectorXd empirical_mean(const Ensemble& ensemble);

/// Little-endian float64, row-major, plus "<path>.json" sidecar describing the layout and config.
void write_ensemble_binary(const Ensemble& ensemble, const Model& model, const SimConfig& config,
                           const std::filesystem::path& path);
Ensemble read_ensemble_binary(const std::filesystem::path& path);
void write_ensemble_csv(const Ensemble& ensemble, const std::filesystem::path& path);

}  // namespace ou
