#pragma once

// Independent reference computations used only by tests. None of them call into the
// library's numerical kernels.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ouspec/core.hpp"
#include "ouspec/polynomial.hpp"

namespace oracle {

/// e^{sM} by a plain Taylor series with scaling and squaring.
inline Eigen::MatrixXd taylor_exp(const Eigen::MatrixXd& m, double s) {
  Eigen::MatrixXd a = s * m;
  int squarings = 0;
  while (a.lpNorm<Eigen::Infinity>() > 0.5) {
    a /= 2.0;
    ++squarings;
  }
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Integral of e^{sB} Q e^{sB^T} over [0, t] by composite Simpson with `panels` (even) panels.
inline Eigen::MatrixXd simpson_covariance(const Eigen::MatrixXd& q, const Eigen::MatrixXd& b, double t, int panels) {
  const double h = t / panels;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  for (int k = 0; k <= panels; ++k) {
    const Eigen::MatrixXd e = taylor_exp(b, k * h);
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * e * q * e.transpose();
  }
  return sum * h / 3.0;
}

/// E[prod x_{idx_k}] by summing over every perfect matching of the index list.
template <class R>
R isserlis_brute_force(const ou::Matrix<R>& sigma, std::vector<int> idx) {
  if (idx.empty()) return R(1);
  if (idx.size() % 2) return R(0);
  const int first = idx.front();
  R total(0);
  for (std::size_t j = 1; j < idx.size(); ++j) {
    std::vector<int> rest;
    for (std::size_t k = 1; k < idx.size(); ++k)
      if (k != j) rest.push_back(idx[k]);
    total += sigma(first, idx[j]) * isserlis_brute_force(sigma, rest);
  }
  return total;
}

inline std::vector<int> expand_indices(const ou::MultiIndex& alpha) {
  std::vector<int> idx;
  for (int i = 0; i < alpha.dim(); ++i)
    for (int r = 0; r < alpha[i]; ++r) idx.push_back(i);
  return idx;
}

/// Integral of f over [lo, hi] by composite Simpson.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
  return sum * h / 3.0;
}

/// E[x^k] for x ~ N(0, var) by quadrature of the density.
inline double gaussian_moment_1d(int k, double var) {
  const double sd = std::sqrt(var);
  return simpson(
      [&](double x) {
        return std::pow(x, k) * std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
      },
      -14.0 * sd, 14.0 * sd, 20000);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Two-sided Kolmogorov-Smirnov statistic of `xs` against N(0, var).
inline double ks_statistic(std::vector<double> xs, double var) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  const double sd = std::sqrt(var);
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i] / sd);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// Critical value at level 0.01 for large samples.
inline double ks_critical_001(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

/// Plain Monte Carlo estimate of E[x^alpha] for x ~ N(0, sigma).
struct MonteCarloMoment {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Sample mean of x^alpha over i.i.d. N(0, sigma) draws together with its standard error.
inline MonteCarloMoment monte_carlo_moment(const Eigen::MatrixXd& sigma, const ou::MultiIndex& alpha, int draws,
                                           unsigned seed) {
  const Eigen::MatrixXd l = sigma.llt().matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double sum = 0.0, sum_sq = 0.0;
  Eigen::VectorXd z(sigma.rows());
  for (int k = 0; k < draws; ++k) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    const Eigen::VectorXd x = l * z;
    double v = 1.0;
    for (int i = 0; i < alpha.dim(); ++i) v *= std::pow(x(i), alpha[i]);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double var = (sum_sq - draws * mean * mean) / (draws - 1);
  return {mean, std::sqrt(std::max(var, 0.0) / draws)};
}

}  // namespace oracle
