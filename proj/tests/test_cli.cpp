#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "schema_check.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string cli_path() {
  const char* env = std::getenv("JULIADYN_CLI");
  REQUIRE(env != nullptr);
  return env;
}

RunResult run_cli(const std::string& args) {
  std::string command = "\"" + cli_path() + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0)
    result.out.append(buffer, got);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

nlohmann::json load_schema() {
  const char* env = std::getenv("JULIADYN_SCHEMA");
  REQUIRE(env != nullptr);
  std::ifstream in(env);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

juliadyn_cli::SchemaChecker& checker() {
  static juliadyn_cli::SchemaChecker instance(load_schema());
  return instance;
}

void expect_valid(const nlohmann::json& doc) {
  std::string why;
  bool ok = checker().validate(doc, &why);
  INFO("schema violation: " << why);
  CHECK(ok);
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char ch : text)
    if (ch == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("lyap at the center emits a schema-valid document with -log 2") {
  auto r = run_cli("lyap --family quad --c 0,0 --weights 0.5,0.5 --method conjugacy");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  expect_valid(doc);
  CHECK(doc.at("command") == "lyap");
  CHECK(doc.at("family") == "quadratic");
  double value = doc.at("result").at("value").get<double>();
  CHECK(value == doctest::Approx(-0.6931471805599453).epsilon(1e-9));
  CHECK(doc.at("result").at("positive_exponent").get<double>() ==
        doctest::Approx(0.6931471805599453).epsilon(1e-9));
}

TEST_CASE("sampled runs with a fixed seed are byte-identical") {
  const std::string args =
      "lyap --family quad --c 0.05,0 --method mc --chains 8 --steps 2000 "
      "--burn 200 --seed 42";
  auto first = run_cli(args);
  auto second = run_cli(args);
  REQUIRE(first.exit_code == 0);
  REQUIRE(second.exit_code == 0);
  CHECK(!first.out.empty());
  CHECK(first.out == second.out);
}

TEST_CASE("dimension and pressure at the center") {
  auto dim = run_cli("dimension --family quad --c 0,0");
  REQUIRE(dim.exit_code == 0);
  auto dim_doc = nlohmann::json::parse(dim.out);
  expect_valid(dim_doc);
  CHECK(dim_doc.at("result").at("dimension").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-5));

  auto pres = run_cli("pressure --family quad --c 0,0 --s 1.0");
  REQUIRE(pres.exit_code == 0);
  auto pres_doc = nlohmann::json::parse(pres.out);
  expect_valid(pres_doc);
  CHECK(std::abs(pres_doc.at("result").at("value").get<double>()) < 1e-6);
  CHECK(pres_doc.at("result").at("converged").get<bool>());
}

TEST_CASE("orbit listing in both formats") {
  auto js = run_cli("orbits --family quad --c 0.05,0 --n 4");
  REQUIRE(js.exit_code == 0);
  auto doc = nlohmann::json::parse(js.out);
  expect_valid(doc);
  CHECK(doc.at("count").get<int>() == 15);
  CHECK(doc.at("points").size() == 15);
  CHECK(doc.at("itineraries").size() == 15);

  auto csv = run_cli("orbits --family quad --c 0.05,0 --n 4 --format csv");
  REQUIRE(csv.exit_code == 0);
  CHECK(csv.out.rfind("index,re,im,abs_multiplier,itinerary", 0) == 0);
  CHECK(count_lines(csv.out) == 16);  // header + 15 rows
}

TEST_CASE("expansion report validates and passes strict mode") {
  auto r = run_cli(
      "expand --family quad --measure dirac --symbol 1 --mode first-order "
      "--strict");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  expect_valid(doc);
  CHECK(doc.at("diagnostics").at("strategies_agree").get<bool>());
  CHECK(doc.at("diagnostics").at("all_reference_pass").get<bool>());
  bool found_linear = false;
  for (const auto& row : doc.at("rows")) {
    if (row.at("monomial") == "c_re") {
      found_linear = true;
      CHECK(row.at("pointwise").get<double>() == doctest::Approx(1.0).epsilon(0.01));
      CHECK(row.at("status") == "pass");
    }
  }
  CHECK(found_linear);
}

TEST_CASE("julia cloud with svg side channel") {
  const std::string svg_path = "/tmp/juliadyn_test_cloud.svg";
  std::remove(svg_path.c_str());
  auto r = run_cli("julia --family quad --c 0,0 --n 500 --svg " + svg_path);
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  expect_valid(doc);
  CHECK(doc.at("count").get<int>() == 500);
  CHECK(doc.at("classification").at("verdict") == "hyperbolic-connected");

  std::ifstream svg(svg_path);
  REQUIRE(svg.good());
  std::string head(4, '\0');
  svg.read(head.data(), 4);
  CHECK(head == "<svg");
  std::remove(svg_path.c_str());
}

TEST_CASE("exit codes distinguish usage errors from domain errors") {
  CHECK(run_cli("lyap --family quad --no-such-flag").exit_code == 1);
  CHECK(run_cli("").exit_code == 1);  // no subcommand: help + failure
  CHECK(run_cli("lyap --family quad --c 2,0").exit_code == 2);  // out of family
  CHECK(run_cli("lyap --family quad --c 0,0 --weights 0.2,0.3,0.5").exit_code ==
        2);  // alphabet mismatch
}

TEST_CASE("single verification criterion over csv") {
  auto r = run_cli("verify --criterion 5 --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("id,description,computed,target,tolerance,pass,tag", 0) == 0);
  CHECK(count_lines(r.out) >= 4);
}

TEST_CASE("schema rejects documents with missing fields") {
  auto r = run_cli("lyap --family quad --c 0,0");
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  doc.erase("result");
  std::string why;
  CHECK_FALSE(checker().validate(doc, &why));
  CHECK(!why.empty());
}

TEST_CASE("output file option writes the same document") {
  const std::string out_path = "/tmp/juliadyn_test_out.json";
  std::remove(out_path.c_str());
  auto r = run_cli("lyap --family quad --c 0,0 --out " + out_path);
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out_path);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto doc = nlohmann::json::parse(buffer.str());
  expect_valid(doc);
  std::remove(out_path.c_str());
}
