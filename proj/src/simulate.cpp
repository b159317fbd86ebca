#include "ouspec/simulate.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ou {

TransitionSampler::TransitionSampler(const Model& model, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::invalid_params, "step h must be positive");
  propagator_ = matrix_exponential(model.b(), step);
  const Eigen::MatrixXd q_h = covariance_at(model, step).sigma;
  Eigen::LLT<Eigen::MatrixXd> llt(q_h);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::cholesky_failure, "Q_h is not positive definite for h = " + std::to_string(step));
  noise_factor_ = llt.matrixL();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

void run_path(const TransitionSampler& sampler, const SimConfig& config, long long burn_in, long long path,
              int dim, Eigen::Ref<Eigen::RowVectorXd> row) {
  auto rng = path_rng(config.seed, static_cast<std::uint64_t>(path));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  for (long long step = 0; step < burn_in; ++step) x = sampler(x, rng);
  row = x.transpose();
}

Ensemble prepare(const Model& model, const SimConfig& config, long long& burn_in) {
  if (config.paths <= 0) throw Error(ErrorKind::invalid_params, "path count must be positive");
  if (config.burn_in < 0) throw Error(ErrorKind::invalid_params, "burn-in must be nonnegative");
  burn_in = config.burn_in > 0 ? config.burn_in : default_burn_in(model, config.step);
  Ensemble e;
  e.samples.resize(config.paths, model.dim());
  e.burn_in = burn_in;
  e.config_hash = config_hash(model, config);
  return e;
}

}  // namespace

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(path)));
}

long long default_burn_in(const Model& model, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::invalid_params, "step h must be positive");
  const Eigen::MatrixXd e = matrix_exponential(model.b(), step);
  Eigen::MatrixXd power = e;
  for (long long m = 1; m <= 100000000; ++m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(power);
    if (svd.singularValues()(0) < 1e-6) return m;
    power = power * e;
  }
  throw Error(ErrorKind::convergence_failure, "burn-in search did not reach the decay target");
}

std::uint64_t config_hash(const Model& model, const SimConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const int n = model.dim();
  fnv1a(h, &n, sizeof n);
  fnv1a(h, model.q().data(), sizeof(double) * static_cast<std::size_t>(model.q().size()));
  fnv1a(h, model.b().data(), sizeof(double) * static_cast<std::size_t>(model.b().size()));
  fnv1a(h, &config.step, sizeof config.step);
  fnv1a(h, &config.burn_in, sizeof config.burn_in);
  fnv1a(h, &config.paths, sizeof config.paths);
  fnv1a(h, &config.seed, sizeof config.seed);
  return h;
}

namespace kernels {

Ensemble ensemble_serial(const Model& model, const SimConfig& config) {
  long long burn_in = 0;
  Ensemble e = prepare(model, config, burn_in);
  const TransitionSampler sampler(model, config.step);
  for (long long p = 0; p < config.paths; ++p) run_path(sampler, config, burn_in, p, model.dim(), e.samples.row(p));
  return e;
}

Ensemble ensemble_parallel(const Model& model, const SimConfig& config) {
  long long burn_in = 0;
  Ensemble e = prepare(model, config, burn_in);
  const TransitionSampler sampler(model, config.step);
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < config.paths; ++p) run_path(sampler, config, burn_in, p, model.dim(), e.samples.row(p));
  return e;
}

}  // namespace kernels

Ensemble stationary_ensemble(const Model& model, const SimConfig& config, Execution execution) {
  return execution == Execution::serial ? kernels::ensemble_serial(model, config)
                                        : kernels::ensemble_parallel(model, config);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

PairingEstimate estimate_pairing(const Ensemble& ensemble, const Polynomial<double>& p, const Polynomial<double>& q) {
  const auto n = static_cast<std::size_t>(ensemble.samples.rows());
  const int dim = static_cast<int>(ensemble.samples.cols());
  if (p.dim() != dim || q.dim() != dim)
    throw Error(ErrorKind::dimension_mismatch, "estimate_pairing: polynomial dimension differs from ensemble");
  if (n < 2) throw Error(ErrorKind::invalid_params, "estimate_pairing needs at least two samples");
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd x = ensemble.samples.row(static_cast<Eigen::Index>(i)).transpose();
    const std::span<const double> point(x.data(), static_cast<std::size_t>(dim));
    f[i] = p.evaluate(point) * q.evaluate(point);
  }
  const double total = pairwise_sum(f);
  const double nd = static_cast<double>(n);
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) loo[i] = (total - f[i]) / (nd - 1.0);
  const double loo_mean = pairwise_sum(loo) / nd;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (loo[i] - loo_mean) * (loo[i] - loo_mean);
  return {total / nd, std::sqrt((nd - 1.0) / nd * pairwise_sum(dev))};
}

Eigen::VectorXd empirical_mean(const Ensemble& ensemble) {
  const auto n = ensemble.samples.rows();
  Eigen::VectorXd mean(ensemble.samples.cols());
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < ensemble.samples.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = ensemble.samples(i, j);
    mean(j) = pairwise_sum(column) / static_cast<double>(n);
  }
  return mean;
}

Eigen::MatrixXd empirical_covariance(const Ensemble& ensemble) {
  const auto n = ensemble.samples.rows();
  const auto d = ensemble.samples.cols();
  const Eigen::VectorXd mean = empirical_mean(ensemble);
  Eigen::MatrixXd cov(d, d);
  std::vector<double> products(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) {
      for (Eigen::Index i = 0; i < n; ++i)
        products[static_cast<std::size_t>(i)] = (ensemble.samples(i, a) - mean(a)) * (ensemble.samples(i, b) - mean(b));
      cov(a, b) = cov(b, a) = pairwise_sum(products) / static_cast<double>(n - 1);
    }
  return cov;
}

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::filesystem::path sidecar_of(const std::filesystem::path& path) {
  auto s = path;
  s += ".json";
  return s;
}

}  // namespace

void write_ensemble_binary(const Ensemble& ensemble, const Model& model, const SimConfig& config,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::schema_error, "cannot open " + path.string() + " for writing");
  for (Eigen::Index i = 0; i < ensemble.samples.rows(); ++i)
    for (Eigen::Index j = 0; j < ensemble.samples.cols(); ++j) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(ensemble.samples(i, j));
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  nlohmann::json meta;
  meta["format"] = "float64-le";
  meta["layout"] = "row-major";
  meta["rows"] = ensemble.samples.rows();
  meta["cols"] = ensemble.samples.cols();
  meta["burn_in"] = ensemble.burn_in;
  meta["hash"] = hex(ensemble.config_hash);
  meta["config"] = {{"step", config.step}, {"burn_in", config.burn_in}, {"paths", config.paths}, {"seed", config.seed}};
  std::vector<std::vector<double>> q(model.dim()), b(model.dim());
  for (int i = 0; i < model.dim(); ++i)
    for (int j = 0; j < model.dim(); ++j) {
      q[i].push_back(model.q()(i, j));
      b[i].push_back(model.b()(i, j));
    }
  meta["model"] = {{"Q", q}, {"B", b}};
  std::ofstream side(sidecar_of(path));
  side << meta.dump(2) << "\n";
}

Ensemble read_ensemble_binary(const std::filesystem::path& path) {
  std::ifstream side(sidecar_of(path));
  if (!side) throw Error(ErrorKind::schema_error, "missing sidecar " + sidecar_of(path).string());
  const auto meta = nlohmann::json::parse(side);
  Ensemble e;
  const auto rows = meta.at("rows").get<Eigen::Index>();
  const auto cols = meta.at("cols").get<Eigen::Index>();
  e.burn_in = meta.at("burn_in").get<long long>();
  e.config_hash = std::stoull(meta.at("hash").get<std::string>(), nullptr, 16);
  e.samples.resize(rows, cols);
  std::ifstream in(path, std::ios::binary);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::uint64_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits))
        throw Error(ErrorKind::schema_error, "ensemble file shorter than its sidecar declares");
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      e.samples(i, j) = std::bit_cast<double>(bits);
    }
  return e;
}

void write_ensemble_csv(const Ensemble& ensemble, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::schema_error, "cannot open " + path.string() + " for writing");
  out.precision(17);
  for (Eigen::Index j = 0; j < ensemble.samples.cols(); ++j) out << (j ? "," : "") << "x" << j + 1;
  out << "\n";
  for (Eigen::Index i = 0; i < ensemble.samples.rows(); ++i) {
    for (Eigen::Index j = 0; j < ensemble.samples.cols(); ++j) out << (j ? "," : "") << ensemble.samples(i, j);
    out << "\n";
  }
}

}  // namespace ou
