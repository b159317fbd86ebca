#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ouspec/model.hpp"
#include "ouspec/polynomial.hpp"
#include "ouspec/spectral.hpp"

namespace ou::report {

using nlohmann::json;

/// Raw model file contents; entries are kept exact.
struct ModelInput {
  RationalMatrix q;
  RationalMatrix b;
};

/// {"Q": [[...]], "B": [[...]]}; entries are JSON numbers or strings such as "p/q" or "-0.5".
/// Throws SchemaError with the line (for syntax errors) or the field path.
ModelInput parse_model_json(const std::string& text);
ModelInput parse_model_file(const std::filesystem::path& path);

json to_json(const Rational& v);
json to_json(const Complex& z);
json to_json(const Eigen::MatrixXd& m);
json to_json(const RationalMatrix& m);
json to_json(const Eigen::MatrixXcd& m);

/// {"dim": N, "terms": [{"alpha": [...], "re": ..., "im": ...}]}; rationals as strings.
template <class T>
json polynomial_to_json(const Polynomial<T>& p);

template <class T>
Polynomial<T> polynomial_from_json(const json& j);

json model_to_json(const Model& model);
json spectrum_to_json(const SpectrumSet& spectrum);
json decomposition_to_json(const SpectralDecomposition& dec);
json orthogonality_to_json(const OrthogonalityReport& report, const SpectralDecomposition& dec);

/// Checks a report against the published schema for its "kind". Throws SchemaError.
void validate_report(const json& report);

/// Indented "key: value" rendering carrying the same values as the JSON.
std::string to_human(const json& report);

/// Flattened "path,value" rows.
std::string to_flat_csv(const json& report);

}  // namespace ou::report
