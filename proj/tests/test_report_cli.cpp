#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ouspec/cli.hpp"
#include "ouspec/report.hpp"

using namespace ou;
using report::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::path(OU_TEST_TMPDIR) / name;
  std::ofstream(path) << text;
  return path.string();
}

const char* rotation_json = R"({"Q": [[1,0],[0,1]], "B": [["-1","1"],["-1","-1"]]})";

ErrorKind kind_of(const std::string& text) {
  try {
    report::parse_model_json(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::not_symmetric;  // sentinel: parsed fine
}

}  // namespace

TEST(ModelFile, ParsesStringsAndNumbersExactly) {
  const auto in = report::parse_model_json(R"({"Q": [[1, 0.5], [0.5, "3/2"]], "B": [["-1", 0], [0, -2]]})");
  EXPECT_EQ(in.q(0, 1), Rational(1, 2));
  EXPECT_EQ(in.q(1, 1), Rational(3, 2));
  EXPECT_EQ(in.b(1, 1), Rational(-2));
  const auto one = report::parse_model_json(R"({"Q": [[1]], "B": [["-1"]]})");
  EXPECT_EQ(one.b.rows(), 1);
}

TEST(ModelFile, SchemaErrorsCarryLocation) {
  EXPECT_EQ(kind_of(R"({"Q": [[1]]})"), ErrorKind::schema_error);
  try {
    report::parse_model_json("{\"Q\": [[1]],\n \"B\": [[\"-1\"]\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(e.message().find("line 3"), std::string::npos) << e.message();
  }
  try {
    report::parse_model_json(R"({"Q": [[1,0],[0,1]], "B": [[-1, 0], [true, -1]]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(e.message().find("B[1][0]"), std::string::npos) << e.message();
  }
  EXPECT_EQ(kind_of(R"({"Q": [[1,0],[0,1]], "B": [[-1, 0]]})"), ErrorKind::schema_error);
  EXPECT_EQ(kind_of(R"({"Q": [[1]], "B": [["x/2"]]})"), ErrorKind::schema_error);
}

TEST(PolynomialJson, RoundTrips) {
  Polynomial<Rational> p(2);
  p.add_term(MultiIndex({2, 0}), Rational(1));
  p.add_term(MultiIndex({0, 0}), Rational(-5, 6));
  EXPECT_EQ(report::polynomial_from_json<Rational>(report::polynomial_to_json(p)), p);
  Polynomial<Complex> c(1);
  c.add_term(MultiIndex({3}), Complex(0.25, -1.5));
  EXPECT_TRUE(report::polynomial_from_json<Complex>(report::polynomial_to_json(c)) == c);
}

TEST(Cli, TriangularExampleReportsHeadlineValue) {
  const auto r = run({"paper-example", "section5", "--a", "2", "--d", "1", "--c", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"1/8\""), std::string::npos);
  const json j = json::parse(r.out);
  std::vector<std::string> eigenvalues;
  for (const auto& f : j.at("eigenfunctions")) eigenvalues.push_back(f.at("eigenvalue"));
  for (const char* v : {"-2", "-4", "-6"}) EXPECT_NE(std::find(eigenvalues.begin(), eigenvalues.end(), v), eigenvalues.end());
  EXPECT_EQ(j.at("global_verdict"), "not orthogonal");
}

TEST(Cli, ResonantTriangularExampleRecordsSameEigenvaluePair) {
  const auto r = run({"paper-example", "section5", "--a", "4", "--d", "2", "--c", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  bool recorded = false;
  for (const auto& ip : j.at("inner_products"))
    if (ip.at("pair") == "v2,v4") {
      recorded = true;
      EXPECT_TRUE(ip.at("same_eigenvalue").get<bool>());
      EXPECT_FALSE(ip.at("value").get<std::string>().empty());
    }
  EXPECT_TRUE(recorded);
}

TEST(Cli, DecimalParametersAreConvertedExactly) {
  const auto r = run({"paper-example", "section5", "--a", "0.5", "--d", "0.25", "--c", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("params").at("d"), "1/4");
  for (const auto& ip : j.at("inner_products"))
    if (ip.at("pair") == "v1,v3") EXPECT_EQ(ip.at("value"), "2");
}

TEST(Cli, RotationAnalyzeIsOrthogonalWithSimpleEigenfunctions) {
  const auto r = run({"analyze", "--model", write_temp("rot.json", rotation_json), "--degree", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("global_verdict"), "orthogonal");
  for (const auto& g : j.at("groups")) EXPECT_EQ(g.at("nilpotency_index"), 1);
  EXPECT_EQ(j.at("tolerances").at("orth"), 1e-9);
  EXPECT_EQ(j.at("stationary_covariance")[0][0], "1/2");
}

TEST(Cli, ToleranceOverridesAreEchoed) {
  const auto r = run({"analyze", "--model-json", rotation_json, "--degree", "1", "--tol-orth", "1e-7", "--tol-eig", "1e-6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("tolerances").at("orth"), 1e-7);
  EXPECT_EQ(j.at("tolerances").at("eig"), 1e-6);
}

TEST(Cli, SpectrumAtCapZero) {
  const auto r = run({"spectrum", "--model-json", rotation_json, "--degree", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j.at("elements").size(), 1u);
  EXPECT_EQ(j.at("elements")[0].at("value").at("re"), 0.0);
}

TEST(Cli, EveryReportRevalidates) {
  const std::string polys = write_temp("polys.json", R"([{"dim": 2, "terms": [{"alpha": [2, 0], "re": "1", "im": "0"},
      {"alpha": [0, 0], "re": "-1/2", "im": "0"}]}, {"dim": 2, "terms": [{"alpha": [1, 1], "re": 1, "im": 0}]}])");
  const std::string model = write_temp("tri.json", R"({"Q": [[1,0],[0,1]], "B": [[-1,0],[1,-3]]})");
  const std::vector<std::vector<std::string>> commands{
      {"analyze", "--model", model, "--degree", "2"},
      {"spectrum", "--model", model, "--degree", "3"},
      {"gram", "--model", model, "--polys", polys},
      {"gram", "--model", model, "--degree", "2", "--backend", "float"},
      {"normalize", "--model", model},
      {"simulate", "--model", model, "--paths", "200", "--seed", "5", "--polys", polys},
      {"paper-example", "section4", "--degree", "3"},
      {"paper-example", "section5"}};
  for (const auto& c : commands) {
    const auto r = run(c);
    ASSERT_EQ(r.code, 0) << c[0] << ": " << r.err;
    EXPECT_NO_THROW(report::validate_report(json::parse(r.out))) << c[0];
  }
}

TEST(Cli, ExactGramUsesRationalStrings) {
  const std::string polys = write_temp("polys2.json", R"([{"dim": 2, "terms": [{"alpha": [2, 0], "re": "1"},
      {"alpha": [0, 0], "re": "-1/2"}]}, {"dim": 2, "terms": [{"alpha": [2, 0], "re": "1"}, {"alpha": [1, 1], "re": "-4"},
      {"alpha": [0, 2], "re": "4"}, {"alpha": [0, 0], "re": "-5/6"}]}])");
  const auto r = run({"gram", "--model-json", R"({"Q": [[1,0],[0,1]], "B": [[-1,0],[1,-3]]})", "--polys", polys,
                      "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("p0,1/2,1/8"), std::string::npos) << r.out;
}

TEST(Cli, HumanFormatCarriesSameNumbers) {
  const auto j = run({"paper-example", "section5", "--a", "3", "--d", "1", "--c", "2"});
  const auto h = run({"paper-example", "section5", "--a", "3", "--d", "1", "--c", "2", "--format", "human"});
  ASSERT_EQ(h.code, 0);
  const json parsed = json::parse(j.out);
  for (const auto& ip : parsed.at("inner_products"))
    EXPECT_NE(h.out.find("value: " + ip.at("value").get<std::string>()), std::string::npos);
  EXPECT_NE(h.out.find("global_verdict: not orthogonal"), std::string::npos);
}

TEST(Cli, ExitCodeContract) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"analyze", "--degree", "-1", "--model-json", rotation_json}).code, 1);
  EXPECT_EQ(run({"analyze"}).code, 1);  // no model source
  EXPECT_EQ(run({"analyze", "--model", "x.json", "--model-json", rotation_json}).code, 1);
  EXPECT_EQ(run({"analyze", "--model", write_temp("nob.json", R"({"Q": [[1]]})")}).code, 2);
  EXPECT_EQ(run({"analyze", "--model-json", R"({"Q": [[1]], "B": [[1]]})"}).code, 2);
  EXPECT_EQ(run({"analyze", "--model-json", R"({"Q": [[1, 2], [0, 1]], "B": [[-1, 0], [0, -1]]})"}).code, 2);
  EXPECT_EQ(run({"paper-example", "section5", "--a", "1", "--d", "2"}).code, 2);
  EXPECT_EQ(run({"paper-example", "section6"}).code, 1);
  const auto amb = run({"analyze", "--backend", "float", "--degree", "1", "--model-json",
                        R"({"Q": [[1,0],[0,1]], "B": [[-1,0],[0,-1.000000003]]})"});
  EXPECT_EQ(amb.code, 3) << amb.err;
}

TEST(Cli, ErrorsNameTheOffendingInput) {
  const std::string path = write_temp("bad.json", R"({"Q": [[1,0],[0,1]], "B": [[-1,0],["oops",-1]]})");
  const auto r = run({"analyze", "--model", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(path), std::string::npos);
  EXPECT_NE(r.err.find("B[1][0]"), std::string::npos);
}

TEST(Cli, SimulateWritesBinaryWithSidecar) {
  const std::string out = (std::filesystem::path(OU_TEST_TMPDIR) / "cli_ens.bin").string();
  const auto r = run({"simulate", "--model-json", rotation_json, "--paths", "50", "--seed", "3", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(out));
  EXPECT_TRUE(std::filesystem::exists(out + ".json"));
  EXPECT_EQ(std::filesystem::file_size(out), 50u * 2u * 8u);
}

TEST(Cli, ThreadCapEnvironmentVariable) {
  ::setenv("OU_SPECTRA_THREADS", "1", 1);
  EXPECT_EQ(run({"spectrum", "--model-json", rotation_json}).code, 0);
  ::setenv("OU_SPECTRA_THREADS", "lots", 1);
  EXPECT_EQ(run({"spectrum", "--model-json", rotation_json}).code, 1);
  ::unsetenv("OU_SPECTRA_THREADS");
}
