#include <benchmark/benchmark.h>

#include "ouspec/gaussian.hpp"
#include "ouspec/operator.hpp"
#include "ouspec/reference_examples.hpp"
#include "ouspec/simulate.hpp"

using namespace ou;

namespace {

Model dense_model(int n) {
  Eigen::MatrixXd b = -2.0 * Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) b(i, j) = 0.3 / (1 + i + 2 * j);
  return Model::validate(Eigen::MatrixXd::Identity(n, n), b);
}

std::vector<Polynomial<double>> monomials(int dim, int degree) {
  std::vector<Polynomial<double>> out;
  for (const auto& a : monomial_basis(dim, degree).indices) out.push_back(Polynomial<double>::monomial(a));
  return out;
}

void gram(benchmark::State& state, Execution execution) {
  const Model m = dense_model(3);
  const Eigen::MatrixXd sigma = solve_lyapunov(m).sigma;
  const auto fs = monomials(3, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const Eigen::MatrixXd g = execution == Execution::serial ? kernels::gram_serial<double>(fs, sigma)
                                                             : kernels::gram_parallel<double>(fs, sigma);
    benchmark::DoNotOptimize(g.data());
  }
  state.counters["basis"] = static_cast<double>(fs.size());
}

void assembly(benchmark::State& state, Execution execution) {
  const Model m = dense_model(3);
  const int degree = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto op = operator_matrix<double>(m, degree, OperatorTag::generator, execution);
    benchmark::DoNotOptimize(op.entries.data());
  }
}

void assembly_exact(benchmark::State& state, Execution execution) {
  const Model m = reference::triangular_model({2, 1, 1});
  const int degree = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto op = operator_matrix<Rational>(m, degree, OperatorTag::generator, execution);
    benchmark::DoNotOptimize(op.entries.data());
  }
}

void ensemble(benchmark::State& state, Execution execution) {
  const Model m = reference::triangular_model({2, 1, 1}).as_float();
  const SimConfig cfg{0.1, 0, state.range(0), 1};
  for (auto _ : state) {
    const Ensemble e = execution == Execution::serial ? kernels::ensemble_serial(m, cfg) : kernels::ensemble_parallel(m, cfg);
    benchmark::DoNotOptimize(e.samples.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(gram, serial, Execution::serial)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(gram, parallel, Execution::parallel)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembly, serial, Execution::serial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembly, parallel, Execution::parallel)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembly_exact, serial, Execution::serial)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembly_exact, parallel, Execution::parallel)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(ensemble, serial, Execution::serial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(ensemble, parallel, Execution::parallel)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
