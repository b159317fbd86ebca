#include "ouspec/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "ouspec/operator.hpp"
#include "ouspec/reference_examples.hpp"
#include "ouspec/report.hpp"
#include "ouspec/simulate.hpp"
#include "ouspec/spectral.hpp"

namespace ou::cli {

namespace {

using report::json;

constexpr const char* generator_convention = "L f = 1/2 tr(Q D^2 f) + <B x, grad f>";

struct RunConfig {
  std::string model_path;
  std::string model_inline;
  int degree = 4;
  Tolerances tol;
  std::string backend = "exact";
  std::string format = "json";
  std::uint64_t seed = 0;
  long long paths = 100000;
  double step = 0.1;
  long long burn_in = 0;
  std::string out_path;
  std::string polys_path;
  std::string example;
  std::string a = "2", d = "1", c = "1";
};

/// Usage problems detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--model", cfg.model_path, "JSON model file {\"Q\": [[..]], \"B\": [[..]]}");
  cmd->add_option("--model-json", cfg.model_inline, "model given inline as JSON text");
  cmd->add_option("--backend", cfg.backend, "exact | float")->check(CLI::IsMember({"exact", "float"}));
}

void add_analysis_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--degree", cfg.degree, "degree cap")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tol-eig", cfg.tol.eig, "eigenvalue grouping tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--tol-orth", cfg.tol.orth, "orthogonality tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--tol-nilp", cfg.tol.nilp, "generalized eigenvector residual tolerance")->check(CLI::PositiveNumber);
}

void add_format_option(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--format", cfg.format, "json | csv | human")->check(CLI::IsMember({"json", "csv", "human"}));
}

Model load_model(const RunConfig& cfg) {
  const bool from_file = !cfg.model_path.empty();
  if (from_file == !cfg.model_inline.empty())
    throw UsageError("exactly one of --model or --model-json is required");
  const std::string source = from_file ? "model file " + cfg.model_path : "inline model";
  try {
    const report::ModelInput in =
        from_file ? report::parse_model_file(cfg.model_path) : report::parse_model_json(cfg.model_inline);
    if (cfg.backend == "exact") return Model::validate(in.q, in.b);
    return Model::validate(matrix_cast<double>(in.q), matrix_cast<double>(in.b));
  } catch (const Error& e) {
    throw Error(e.kind(), source + ": " + e.message());
  }
}

json covariance_json(const CovarianceMatrix& cov) {
  return cov.exact ? report::to_json(*cov.exact) : report::to_json(cov.sigma);
}

json drift_json(const std::vector<Complex>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(report::to_json(v));
  return out;
}

json tolerances_json(const Tolerances& tol) {
  return {{"eig", tol.eig}, {"orth", tol.orth}, {"nilp", tol.nilp}, {"rank", tol.rank}};
}

json analysis_body(const Model& model, const RunConfig& cfg, const CovarianceMatrix& cov) {
  const SpectrumSet spec = spectrum(model, cfg.degree, cfg.tol.eig);
  const SpectralDecomposition dec = generalized_eigenspaces(model, cfg.degree, cfg.tol);
  const OrthogonalityReport orth = orthogonality_report(dec, cov.sigma, cfg.tol.orth);
  int max_index = 0;
  for (const auto& g : dec.groups) max_index = std::max(max_index, g.nilpotency_index);
  json r;
  r["spectrum"] = report::spectrum_to_json(spec);
  r["groups"] = report::decomposition_to_json(dec);
  r["max_nilpotency_index"] = max_index;
  r["orthogonality"] = report::orthogonality_to_json(orth, dec);
  r["global_verdict"] = r["orthogonality"]["global_verdict"];
  return r;
}

json run_analyze(const RunConfig& cfg) {
  const Model model = load_model(cfg);
  const CovarianceMatrix cov = solve_lyapunov(model);
  json r;
  r["kind"] = "analyze";
  r["generator_convention"] = generator_convention;
  r["model"] = report::model_to_json(model);
  r["backend"] = model.has_exact() ? "exact" : "float";
  r["tolerances"] = tolerances_json(cfg.tol);
  r["degree_cap"] = cfg.degree;
  r["drift_eigenvalues"] = drift_json(model.drift_eigenvalues());
  r["stationary_covariance"] = covariance_json(cov);
  r.update(analysis_body(model, cfg, cov));
  return r;
}

json run_spectrum(const RunConfig& cfg) {
  const Model model = load_model(cfg);
  const SpectrumSet spec = spectrum(model, cfg.degree, cfg.tol.eig);
  return {{"kind", "spectrum"},
          {"generator_convention", generator_convention},
          {"tolerances", tolerances_json(cfg.tol)},
          {"degree_cap", cfg.degree},
          {"drift_eigenvalues", drift_json(spec.drift)},
          {"elements", report::spectrum_to_json(spec)}};
}

std::vector<json> read_polynomial_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::schema_error, "cannot read polynomial file " + path);
  json list;
  try {
    list = json::parse(in);
  } catch (const json::parse_error&) {
    throw Error(ErrorKind::schema_error, "polynomial file " + path + ": invalid JSON");
  }
  if (!list.is_array()) throw Error(ErrorKind::schema_error, "polynomial file " + path + ": expected an array");
  return list.get<std::vector<json>>();
}

json run_gram(const RunConfig& cfg) {
  const Model model = load_model(cfg);
  const CovarianceMatrix cov = solve_lyapunov(model);
  json r;
  r["kind"] = "gram";
  r["generator_convention"] = generator_convention;
  r["stationary_covariance"] = covariance_json(cov);
  json labels = json::array();

  if (!cfg.polys_path.empty()) {
    const auto items = read_polynomial_list(cfg.polys_path);
    for (std::size_t i = 0; i < items.size(); ++i) labels.push_back("p" + std::to_string(i));
    r["labels"] = labels;
    if (cov.exact) {
      try {
        std::vector<Polynomial<Rational>> fs;
        for (const auto& j : items) fs.push_back(report::polynomial_from_json<Rational>(j));
        r["gram"] = report::to_json(gram_matrix<Rational>(fs, *cov.exact));
        r["exact"] = true;
        return r;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::schema_error) throw;
      }
    }
    std::vector<Polynomial<Complex>> fs;
    for (std::size_t i = 0; i < items.size(); ++i) {
      try {
        fs.push_back(report::polynomial_from_json<Complex>(items[i]));
      } catch (const Error& e) {
        throw Error(e.kind(), "polynomial file " + cfg.polys_path + ", entry " + std::to_string(i) + ": " + e.message());
      }
    }
    r["gram"] = report::to_json(gram_matrix<Complex>(fs, cov.sigma));
    r["exact"] = false;
    return r;
  }

  const SpectralDecomposition dec = generalized_eigenspaces(model, cfg.degree, cfg.tol);
  std::vector<Polynomial<Complex>> fs;
  for (std::size_t g = 0; g < dec.groups.size(); ++g)
    for (std::size_t k = 0; k < dec.groups[g].basis.size(); ++k) {
      fs.push_back(dec.groups[g].basis[k]);
      labels.push_back("g" + std::to_string(g) + "." + std::to_string(k));
    }
  r["labels"] = labels;
  r["degree_cap"] = cfg.degree;
  r["groups"] = report::decomposition_to_json(dec);
  r["gram"] = report::to_json(gram_matrix<Complex>(fs, cov.sigma));
  r["exact"] = false;
  return r;
}

json run_normalize(const RunConfig& cfg) {
  const Model model = load_model(cfg);
  const Normalization norm = normalize_model(model);
  const RotationSplit split = rotation_split(norm.model, 1e-8);
  return {{"kind", "normalize"},
          {"generator_convention", generator_convention},
          {"H", report::to_json(norm.change.h)},
          {"H_inv", report::to_json(norm.change.h_inv)},
          {"Q", report::to_json(norm.model.q())},
          {"B", report::to_json(norm.model.b())},
          {"stationary_covariance", report::to_json(Eigen::MatrixXd(norm.stationary_diagonal.asDiagonal()))},
          {"rotation_part", report::to_json(split.c)},
          {"rotation_skew_defect", split.skew_defect()}};
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json run_simulate(const RunConfig& cfg) {
  const Model model = load_model(cfg).as_float();
  const SimConfig sim{cfg.step, cfg.burn_in, cfg.paths, cfg.seed};
  const Ensemble ensemble = stationary_ensemble(model, sim);
  const Eigen::MatrixXd empirical = empirical_covariance(ensemble);
  const Eigen::MatrixXd exact = solve_lyapunov(model).sigma;
  const double rel = ((empirical - exact).cwiseAbs().array() / exact.cwiseAbs().array().max(1e-300)).maxCoeff();

  std::ostringstream hash;
  hash << std::hex << ensemble.config_hash;
  json r = {{"kind", "simulate"},
            {"generator_convention", generator_convention},
            {"paths", sim.paths},
            {"burn_in", ensemble.burn_in},
            {"step", sim.step},
            {"seed", sim.seed},
            {"hash", hash.str()},
            {"empirical_covariance", report::to_json(empirical)},
            {"stationary_covariance", report::to_json(exact)},
            {"max_relative_covariance_error", rel}};

  if (!cfg.out_path.empty()) {
    if (ends_with(cfg.out_path, ".csv")) write_ensemble_csv(ensemble, cfg.out_path);
    else write_ensemble_binary(ensemble, model, sim, cfg.out_path);
    r["output"] = cfg.out_path;
  }
  if (!cfg.polys_path.empty()) {
    const auto items = read_polynomial_list(cfg.polys_path);
    if (items.size() != 2) throw Error(ErrorKind::schema_error, "simulate --polys expects exactly two polynomials");
    const PairingEstimate est = estimate_pairing(ensemble, report::polynomial_from_json<double>(items[0]),
                                                 report::polynomial_from_json<double>(items[1]));
    r["pairing"] = {{"estimate", est.estimate}, {"standard_error", est.standard_error}};
  }
  return r;
}

Rational parse_param(const std::string& name, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const Error&) {
    throw Error(ErrorKind::invalid_params, "--" + name + " '" + text + "' is not a number");
  }
}

json run_triangular_example(const RunConfig& cfg) {
  const reference::TriangularParams p{parse_param("a", cfg.a), parse_param("d", cfg.d), parse_param("c", cfg.c)};
  reference::check(p);
  const Model model = reference::triangular_model(p);
  const CovarianceMatrix cov = solve_lyapunov(model);
  const auto pairs = reference::triangular_eigenfunctions(p);

  json fs = json::array();
  for (const auto& e : pairs) {
    const Polynomial<Rational> residual = apply_L(model, e.function) - e.function * e.eigenvalue;
    fs.push_back({{"name", e.name},
                  {"text", to_text(e.function)},
                  {"polynomial", report::polynomial_to_json(e.function)},
                  {"eigenvalue", to_string(e.eigenvalue)},
                  {"exact_eigenfunction", residual.is_zero()}});
  }

  json ips = json::array();
  bool all_nonzero = true;
  bool any_nonzero = false;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      // Pairs sharing an eigenvalue are recorded but do not bear on cross-eigenvalue orthogonality.
      const bool same = pairs[i].eigenvalue == pairs[j].eigenvalue;
      const Rational v = inner_product(pairs[i].function, pairs[j].function, *cov.exact);
      if (!same) {
        all_nonzero = all_nonzero && v != 0;
        any_nonzero = any_nonzero || v != 0;
      }
      json ip = {{"pair", pairs[i].name + "," + pairs[j].name}, {"value", to_string(v)}, {"same_eigenvalue", same}};
      if (pairs[i].name == "v1" && pairs[j].name == "v3") {
        const Rational closed = Rational(1) / (2 * p.a * p.a);
        ip["closed_form"] = "1/(2a^2)";
        ip["closed_form_value"] = to_string(closed);
        ip["matches_closed_form"] = v == closed;
      }
      ips.push_back(ip);
    }

  return {{"kind", "paper-example"},
          {"example", "section5"},
          {"generator_convention", generator_convention},
          {"params", {{"a", to_string(p.a)}, {"d", to_string(p.d)}, {"c", to_string(p.c)}}},
          {"model", report::model_to_json(model)},
          {"drift_eigenvalues", drift_json(model.drift_eigenvalues())},
          {"stationary_covariance", covariance_json(cov)},
          {"matches_closed_form_covariance", *cov.exact == reference::triangular_stationary_covariance(p)},
          {"eigenfunctions", fs},
          {"inner_products", ips},
          {"cross_pairs_all_nonzero", all_nonzero},
          {"global_verdict", any_nonzero ? "not orthogonal" : "orthogonal"}};
}

json run_rotation_example(const RunConfig& cfg) {
  const Model model = reference::rotation_model();
  const CovarianceMatrix cov = solve_lyapunov(model);
  const RotationSplit split = rotation_split(model);
  const OperatorMatrix<double> a = operator_matrix_hermite(model, cfg.degree, OperatorTag::doubled);

  json blocks = json::array();
  for (int n = 1; n <= cfg.degree; ++n) {
    const auto start = static_cast<Eigen::Index>(a.basis.prefix_size(n - 1));
    const Eigen::Index size = n + 1;
    const Eigen::MatrixXd block = a.entries.block(start, start, size, size);
    Eigen::MatrixXd closed = hermite_rotation_matrix(split, n);
    closed.diagonal().array() -= 2.0 * n;
    const NormalityCheck normal = check_normal(block.cast<Complex>(), 1e-12);
    blocks.push_back({{"degree", n},
                      {"matrix", report::to_json(block)},
                      {"max_error_vs_closed_form", (block - closed).cwiseAbs().maxCoeff()},
                      {"normal", normal.normal},
                      {"normal_defect", normal.defect}});
  }

  json r = {{"kind", "paper-example"},
            {"example", "section4"},
            {"generator_convention", generator_convention},
            {"model", report::model_to_json(model)},
            {"drift_eigenvalues", drift_json(model.drift_eigenvalues())},
            {"stationary_covariance", covariance_json(cov)},
            {"tolerances", tolerances_json(cfg.tol)},
            {"degree_cap", cfg.degree},
            {"hermite_blocks", blocks}};
  r.update(analysis_body(model, cfg, cov));
  return r;
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object()) {
    const double re = v.at("re").get<double>();
    const double im = v.at("im").get<double>();
    if (im == 0.0) return json(re).dump();
    return json(re).dump() + (im < 0 ? "-" : "+") + json(std::abs(im)).dump() + "i";
  }
  return v.dump();
}

std::string gram_csv(const json& r) {
  std::ostringstream os;
  os << "label";
  for (const auto& l : r.at("labels")) os << "," << l.get<std::string>();
  os << "\n";
  const json& g = r.at("gram");
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << r.at("labels")[i].get<std::string>();
    for (const auto& x : g[i]) os << "," << csv_cell(x);
    os << "\n";
  }
  return os.str();
}

void emit(const json& r, const std::string& format, std::ostream& out) {
  report::validate_report(r);
  if (format == "json") out << r.dump(2) << "\n";
  else if (format == "human") out << report::to_human(r);
  else if (r.at("kind") == "gram") out << gram_csv(r);
  else out << report::to_flat_csv(r);
}

void apply_thread_cap() {
  const char* env = std::getenv("OU_SPECTRA_THREADS");
  if (!env || !*env) return;
  int threads = 0;
  try {
    std::size_t used = 0;
    threads = std::stoi(env, &used);
    if (used != std::string(env).size() || threads < 0) throw std::invalid_argument(env);
  } catch (const std::exception&) {
    throw UsageError(std::string("OU_SPECTRA_THREADS='") + env + "' is not a nonnegative integer");
  }
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Ornstein-Uhlenbeck operator spectra and orthogonality reports", "ou_spectra"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "validate, stationary covariance, eigenspaces, orthogonality");
  add_model_options(analyze, cfg);
  add_analysis_options(analyze, cfg);
  add_format_option(analyze, cfg);

  auto* spec = app.add_subcommand("spectrum", "enumerate sum n_j lambda_j up to the degree cap");
  add_model_options(spec, cfg);
  add_analysis_options(spec, cfg);
  add_format_option(spec, cfg);

  auto* gram = app.add_subcommand("gram", "Gram matrix under the invariant measure");
  add_model_options(gram, cfg);
  add_analysis_options(gram, cfg);
  add_format_option(gram, cfg);
  gram->add_option("--polys", cfg.polys_path, "JSON array of polynomials (default: eigenspace bases)");

  auto* norm = app.add_subcommand("normalize", "coordinates with Q = I and diagonal stationary covariance");
  add_model_options(norm, cfg);
  add_format_option(norm, cfg);

  auto* sim = app.add_subcommand("simulate", "exact-discretization stationary ensemble");
  add_model_options(sim, cfg);
  add_format_option(sim, cfg);
  sim->add_option("--seed", cfg.seed, "base seed");
  sim->add_option("--paths", cfg.paths, "number of paths")->check(CLI::PositiveNumber);
  sim->add_option("--step", cfg.step, "time step h")->check(CLI::PositiveNumber);
  sim->add_option("--burn-in", cfg.burn_in, "steps per path (0 = automatic)")->check(CLI::NonNegativeNumber);
  sim->add_option("--out", cfg.out_path, "ensemble output (.csv, otherwise binary with a .json sidecar)");
  sim->add_option("--polys", cfg.polys_path, "JSON array of two polynomials whose pairing is estimated");

  auto* example = app.add_subcommand("paper-example", "reference models: section4 (rotation) or section5 (triangular)");
  example->add_option("example", cfg.example, "section4 | section5")
      ->required()
      ->check(CLI::IsMember({"section4", "section5"}));
  example->add_option("--a", cfg.a, "triangular model parameter a");
  example->add_option("--d", cfg.d, "triangular model parameter d");
  example->add_option("--c", cfg.c, "triangular model parameter c");
  add_analysis_options(example, cfg);
  add_format_option(example, cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return usage_error;
  }

  try {
    apply_thread_cap();
    json r;
    if (analyze->parsed()) r = run_analyze(cfg);
    else if (spec->parsed()) r = run_spectrum(cfg);
    else if (gram->parsed()) r = run_gram(cfg);
    else if (norm->parsed()) r = run_normalize(cfg);
    else if (sim->parsed()) r = run_simulate(cfg);
    else r = cfg.example == "section4" ? run_rotation_example(cfg) : run_triangular_example(cfg);
    emit(r, cfg.format, out);
    return ok;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return usage_error;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::rank_decision_ambiguous ? ambiguous_rank : validation_error;
  }
}

}  // namespace ou::cli
