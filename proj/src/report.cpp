#include "ouspec/report.hpp"

#include <fstream>
#include <sstream>

namespace ou::report {

namespace {

Rational parse_entry(const json& v, const std::string& path) {
  switch (v.type()) {
    case json::value_t::number_integer: return Rational(v.get<std::int64_t>());
    case json::value_t::number_unsigned: return Rational(v.get<std::uint64_t>());
    case json::value_t::number_float: return rational_from_double(v.get<double>());
    case json::value_t::string:
      try {
        return parse_rational(v.get<std::string>());
      } catch (const Error&) {
        throw Error(ErrorKind::schema_error, path + ": '" + v.get<std::string>() + "' is not a number or \"p/q\" string");
      }
    default: throw Error(ErrorKind::schema_error, path + ": expected a number or \"p/q\" string");
  }
}

RationalMatrix parse_matrix(const json& root, const std::string& key) {
  if (!root.contains(key)) throw Error(ErrorKind::schema_error, "missing field \"" + key + "\"");
  const json& rows = root.at(key);
  if (!rows.is_array() || rows.empty()) throw Error(ErrorKind::schema_error, key + ": expected a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  RationalMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    const std::string row_path = key + "[" + std::to_string(i) + "]";
    if (!row.is_array()) throw Error(ErrorKind::schema_error, row_path + ": expected an array");
    if (static_cast<Eigen::Index>(row.size()) != n)
      throw Error(ErrorKind::schema_error, row_path + ": has " + std::to_string(row.size()) + " entries, matrix must be " +
                                               std::to_string(n) + "x" + std::to_string(n));
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = parse_entry(row[static_cast<std::size_t>(j)], row_path + "[" + std::to_string(j) + "]");
  }
  return m;
}

bool is_scalar(const json& v) {
  if (v.is_number()) return true;
  if (!v.is_string()) return false;
  try {
    parse_rational(v.get<std::string>());
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

ModelInput parse_model_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw Error(ErrorKind::schema_error, "line " + std::to_string(line) + ": invalid JSON");
  }
  if (!root.is_object()) throw Error(ErrorKind::schema_error, "top level must be an object with \"Q\" and \"B\"");
  ModelInput in{parse_matrix(root, "Q"), parse_matrix(root, "B")};
  if (in.q.rows() != in.b.rows())
    throw Error(ErrorKind::schema_error, "Q is " + std::to_string(in.q.rows()) + "x" + std::to_string(in.q.rows()) +
                                             " but B is " + std::to_string(in.b.rows()) + "x" + std::to_string(in.b.rows()));
  return in;
}

ModelInput parse_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::schema_error, "cannot read model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_json(ss.str());
}

json to_json(const Rational& v) { return to_string(v); }
json to_json(const Complex& z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const RationalMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

template <class T>
json polynomial_to_json(const Polynomial<T>& p) {
  json terms = json::array();
  for (const auto& [alpha, c] : p.terms()) {
    json t;
    t["alpha"] = alpha.exponents();
    if constexpr (std::is_same_v<T, Rational>) {
      t["re"] = to_string(c);
      t["im"] = "0";
    } else if constexpr (std::is_same_v<T, Complex>) {
      t["re"] = c.real();
      t["im"] = c.imag();
    } else {
      t["re"] = c;
      t["im"] = 0.0;
    }
    terms.push_back(std::move(t));
  }
  return {{"dim", p.dim()}, {"terms", std::move(terms)}};
}

template <class T>
Polynomial<T> polynomial_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("terms") || !j.at("terms").is_array())
    throw Error(ErrorKind::schema_error, "polynomial: expected {\"dim\", \"terms\"}");
  const int dim = j.at("dim").get<int>();
  Polynomial<T> p(dim);
  for (std::size_t k = 0; k < j.at("terms").size(); ++k) {
    const json& t = j.at("terms")[k];
    const std::string path = "terms[" + std::to_string(k) + "]";
    if (!t.contains("alpha") || !t.at("alpha").is_array() || !t.contains("re"))
      throw Error(ErrorKind::schema_error, path + ": expected alpha and re");
    MultiIndex alpha(t.at("alpha").get<std::vector<int>>());
    if (alpha.dim() != dim) throw Error(ErrorKind::schema_error, path + ".alpha: wrong dimension");
    const Rational re = parse_entry(t.at("re"), path + ".re");
    const Rational im = t.contains("im") ? parse_entry(t.at("im"), path + ".im") : Rational(0);
    if constexpr (std::is_same_v<T, Rational>) {
      if (im != 0) throw Error(ErrorKind::schema_error, path + ": complex coefficient in an exact polynomial");
      p.add_term(alpha, re);
    } else if constexpr (std::is_same_v<T, Complex>) {
      p.add_term(alpha, Complex(re.convert_to<double>(), im.convert_to<double>()));
    } else {
      if (im != 0) throw Error(ErrorKind::schema_error, path + ": complex coefficient in a real polynomial");
      p.add_term(alpha, re.convert_to<double>());
    }
  }
  return p;
}

template json polynomial_to_json(const Polynomial<Rational>&);
template json polynomial_to_json(const Polynomial<double>&);
template json polynomial_to_json(const Polynomial<Complex>&);
template Polynomial<Rational> polynomial_from_json(const json&);
template Polynomial<double> polynomial_from_json(const json&);
template Polynomial<Complex> polynomial_from_json(const json&);

json model_to_json(const Model& model) {
  json out;
  out["dim"] = model.dim();
  if (model.has_exact()) {
    out["Q"] = to_json(model.q_exact());
    out["B"] = to_json(model.b_exact());
  } else {
    out["Q"] = to_json(model.q());
    out["B"] = to_json(model.b());
  }
  return out;
}

json spectrum_to_json(const SpectrumSet& spectrum) {
  json elements = json::array();
  for (const auto& e : spectrum.elements)
    elements.push_back({{"value", to_json(e.value)}, {"multiplicity", e.multiplicity()}, {"witnesses", e.witnesses}});
  return elements;
}

json decomposition_to_json(const SpectralDecomposition& dec) {
  json groups = json::array();
  for (const auto& g : dec.groups) {
    json basis = json::array();
    json text = json::array();
    for (const auto& u : g.basis) {
      basis.push_back(polynomial_to_json(u));
      text.push_back(to_text(u));
    }
    groups.push_back({{"eigenvalue", to_json(g.eigenvalue)},
                      {"multiplicity", g.multiplicity},
                      {"nilpotency_index", g.nilpotency_index},
                      {"residual", g.residual},
                      {"residual_ok", g.residual <= dec.tolerances.nilp},
                      {"witnesses", g.witnesses},
                      {"basis", std::move(basis)},
                      {"basis_text", std::move(text)}});
  }
  return groups;
}

json orthogonality_to_json(const OrthogonalityReport& report, const SpectralDecomposition& dec) {
  json pairs = json::array();
  for (const auto& p : report.pairs)
    pairs.push_back({{"first", p.first},
                     {"second", p.second},
                     {"eigenvalues", {to_json(dec.groups[p.first].eigenvalue), to_json(dec.groups[p.second].eigenvalue)}},
                     {"max_normalized", p.max_normalized},
                     {"orthogonal", p.orthogonal},
                     {"gram", to_json(p.gram)}});
  return {{"tol", report.tol},
          {"orthogonal", report.orthogonal},
          {"global_verdict", report.orthogonal ? "orthogonal" : "not orthogonal"},
          {"max_mean", report.max_mean},
          {"pairs", std::move(pairs)}};
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::schema_error, "report: " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  require(obj.is_object() && obj.contains(key), where + " is missing \"" + key + "\"");
  return obj.at(key);
}

void check_complex(const json& v, const std::string& where) {
  require(v.is_object() && v.contains("re") && v.contains("im") && v.at("re").is_number() && v.at("im").is_number(),
          where + " must be {re, im}");
}

void check_matrix(const json& v, const std::string& where) {
  require(v.is_array(), where + " must be an array of rows");
  for (const auto& row : v) {
    require(row.is_array() && row.size() == v.at(0).size(), where + " rows must be arrays of equal length");
    for (const auto& x : row) require(is_scalar(x) || (x.is_object() && x.contains("re")), where + " has a non-numeric entry");
  }
}

void check_complex_list(const json& v, const std::string& where) {
  require(v.is_array(), where + " must be an array");
  for (std::size_t i = 0; i < v.size(); ++i) check_complex(v[i], where + "[" + std::to_string(i) + "]");
}

void check_spectrum(const json& v, const std::string& where) {
  require(v.is_array(), where + " must be an array");
  for (const auto& e : v) {
    check_complex(field(e, "value", where), where + ".value");
    require(field(e, "multiplicity", where).is_number_integer(), where + ".multiplicity must be an integer");
    require(field(e, "witnesses", where).is_array(), where + ".witnesses must be an array");
  }
}

void check_groups(const json& v) {
  require(v.is_array(), "groups must be an array");
  for (const auto& g : v) {
    check_complex(field(g, "eigenvalue", "group"), "group.eigenvalue");
    require(field(g, "multiplicity", "group").is_number_integer(), "group.multiplicity must be an integer");
    require(field(g, "nilpotency_index", "group").is_number_integer(), "group.nilpotency_index must be an integer");
    require(field(g, "residual", "group").is_number(), "group.residual must be a number");
    const json& basis = field(g, "basis", "group");
    require(basis.is_array(), "group.basis must be an array");
    for (const auto& p : basis) polynomial_from_json<Complex>(p);
  }
}

void check_orthogonality(const json& v) {
  require(field(v, "tol", "orthogonality").is_number(), "orthogonality.tol must be a number");
  require(field(v, "orthogonal", "orthogonality").is_boolean(), "orthogonality.orthogonal must be a boolean");
  require(field(v, "global_verdict", "orthogonality").is_string(), "orthogonality.global_verdict must be a string");
  const json& pairs = field(v, "pairs", "orthogonality");
  require(pairs.is_array(), "orthogonality.pairs must be an array");
  for (const auto& p : pairs) {
    require(field(p, "first", "pair").is_number_integer() && field(p, "second", "pair").is_number_integer(),
            "pair indices must be integers");
    require(field(p, "max_normalized", "pair").is_number(), "pair.max_normalized must be a number");
    require(field(p, "orthogonal", "pair").is_boolean(), "pair.orthogonal must be a boolean");
    check_matrix(field(p, "gram", "pair"), "pair.gram");
  }
}

void check_model(const json& v) {
  require(field(v, "dim", "model").is_number_integer(), "model.dim must be an integer");
  check_matrix(field(v, "Q", "model"), "model.Q");
  check_matrix(field(v, "B", "model"), "model.B");
}

}  // namespace

void validate_report(const json& r) {
  const std::string kind = field(r, "kind", "report").get<std::string>();
  if (kind == "analyze") {
    check_model(field(r, "model", kind));
    require(field(r, "backend", kind).is_string(), "backend must be a string");
    const json& tol = field(r, "tolerances", kind);
    for (const char* k : {"eig", "orth", "nilp", "rank"}) require(field(tol, k, "tolerances").is_number(), "tolerance must be a number");
    require(field(r, "degree_cap", kind).is_number_integer(), "degree_cap must be an integer");
    check_complex_list(field(r, "drift_eigenvalues", kind), "drift_eigenvalues");
    check_matrix(field(r, "stationary_covariance", kind), "stationary_covariance");
    check_spectrum(field(r, "spectrum", kind), "spectrum");
    check_groups(field(r, "groups", kind));
    check_orthogonality(field(r, "orthogonality", kind));
  } else if (kind == "spectrum") {
    require(field(r, "degree_cap", kind).is_number_integer(), "degree_cap must be an integer");
    check_complex_list(field(r, "drift_eigenvalues", kind), "drift_eigenvalues");
    check_spectrum(field(r, "elements", kind), "elements");
  } else if (kind == "gram") {
    require(field(r, "labels", kind).is_array(), "labels must be an array");
    check_matrix(field(r, "gram", kind), "gram");
    require(field(r, "gram", kind).size() == r.at("labels").size(), "gram size must match labels");
  } else if (kind == "normalize") {
    for (const char* k : {"H", "H_inv", "Q", "B", "stationary_covariance"}) check_matrix(field(r, k, kind), k);
  } else if (kind == "simulate") {
    require(field(r, "paths", kind).is_number_integer(), "paths must be an integer");
    require(field(r, "burn_in", kind).is_number_integer(), "burn_in must be an integer");
    require(field(r, "hash", kind).is_string(), "hash must be a string");
    check_matrix(field(r, "empirical_covariance", kind), "empirical_covariance");
    check_matrix(field(r, "stationary_covariance", kind), "stationary_covariance");
  } else if (kind == "paper-example") {
    const std::string example = field(r, "example", kind).get<std::string>();
    check_matrix(field(r, "stationary_covariance", kind), "stationary_covariance");
    check_complex_list(field(r, "drift_eigenvalues", kind), "drift_eigenvalues");
    if (example == "section5") {
      require(field(r, "params", kind).is_object(), "params must be an object");
      const json& fs = field(r, "eigenfunctions", kind);
      require(fs.is_array(), "eigenfunctions must be an array");
      for (const auto& f : fs) {
        polynomial_from_json<Rational>(field(f, "polynomial", "eigenfunction"));
        require(is_scalar(field(f, "eigenvalue", "eigenfunction")), "eigenfunction.eigenvalue must be a number");
      }
      const json& ips = field(r, "inner_products", kind);
      require(ips.is_array(), "inner_products must be an array");
      for (const auto& ip : ips) require(is_scalar(field(ip, "value", "inner_product")), "inner product value must be a number");
    } else if (example == "section4") {
      require(field(r, "hermite_blocks", kind).is_array(), "hermite_blocks must be an array");
      check_groups(field(r, "groups", kind));
      check_orthogonality(field(r, "orthogonality", kind));
    } else {
      require(false, "unknown example '" + example + "'");
    }
  } else {
    require(false, "unknown kind '" + kind + "'");
  }
}

namespace {

void render(const json& v, int indent, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (v.is_object()) {
    if (v.size() == 2 && v.contains("re") && v.contains("im") && v.at("re").is_number()) {
      os << v.at("re").dump() << (v.at("im").get<double>() < 0 ? " - " : " + ")
         << json(std::abs(v.at("im").get<double>())).dump() << "i\n";
      return;
    }
    os << "\n";
    for (const auto& [k, x] : v.items()) {
      os << pad << k << ": ";
      render(x, indent + 1, os);
    }
  } else if (v.is_array()) {
    const bool flat = std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_primitive(); });
    if (flat) {
      os << "[";
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
      os << "]\n";
      return;
    }
    os << "\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      os << pad << "- [" << i << "] ";
      render(v[i], indent + 1, os);
    }
  } else if (v.is_string()) {
    os << v.get<std::string>() << "\n";
  } else {
    os << v.dump() << "\n";
  }
}

void flatten(const json& v, const std::string& path, std::ostringstream& os) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten(x, path.empty() ? k : path + "." + k, os);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], path + "[" + std::to_string(i) + "]", os);
  } else {
    os << path << "," << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

}  // namespace

std::string to_human(const json& report) {
  std::ostringstream os;
  for (const auto& [k, x] : report.items()) {
    os << k << ": ";
    render(x, 1, os);
  }
  return os.str();
}

std::string to_flat_csv(const json& report) {
  std::ostringstream os;
  os << "path,value\n";
  flatten(report, "", os);
  return os.str();
}

}  // namespace ou::report
