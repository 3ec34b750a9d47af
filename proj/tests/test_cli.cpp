#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "superproj/checks.hpp"
#include "superproj/expression.hpp"
#include "support/changes.hpp"
#include "support/triples.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace superproj;
using testing::Generator;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string scenario_file(const char* name) { return std::string(SUPERPROJ_SCENARIOS) + "/" + name; }

ErrorKind kind_of(const std::string& doc) {
  try {
    parse_scenario(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::ValidationError;
}

std::string message_of(const std::string& doc) {
  try {
    parse_scenario(doc);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const CheckResult& result(const Report& r, const std::string& name) {
  for (const auto& c : r.results)
    if (c.name == name) return c;
  throw std::runtime_error("missing result " + name);
}

Scenario random_scenario(Generator& gen, Dimension d) {
  Scenario s;
  s.dim = d;
  s.expressions.emplace("f", gen.function(d, Parity::even, 2) * SuperFunction(d, 1));
  s.connections.emplace("G", testing::random_sym2(gen, d, 2));
  s.connections.emplace("flat", Sym2CovVec(d));
  s.tensors.emplace("S", testing::random_bivector(gen, d, Parity::odd, 2));
  s.tensors.emplace("E", testing::random_bivector(gen, d, Parity::even, 1));
  CoordinateChange c = testing::random_change(gen, d, 2, 2);
  s.changes.emplace("c", c);
  s.changes.emplace("c_forward_only", CoordinateChange(d, c.forward()));
  s.triples.emplace("T", testing::random_triple(gen, d, gen.coin() ? Parity::odd : Parity::even, ratio(gen.integer(-2, 2), 2)));
  SuperFunction rho = SuperFunction(d, 1) + gen.function(d, Parity::even, 1);
  if (gen.coin()) s.rho = parse_expression("(" + rho.to_string() + ")/(1 + x1^2)", d);
  s.checks.push_back({"pc", "projective_class", {{"connection", "G"}}});
  s.checks.push_back({"sch", "schwarzian", {{"change", "c"}, {"connection", "G"}}});
  s.checks.push_back({"ext", "extension_consistency", {{"tensor", "E"}, {"weight", "1/2"}}});
  s.checks.push_back({"can", "canonical_operator", {{"triple", "T"}, {"max_degree", 1}}});
  return s;
}

}  // namespace

TEST_CASE("minimal document gives an empty scenario") {
  Scenario s = parse_scenario(R"({"dimension": "1|1"})");
  CHECK(s.dim == Dimension{1, 1});
  CHECK(s.checks.empty());
  CHECK(s.expressions.empty());
  CHECK(parse_scenario(R"({"dimension": {"n": 1, "m": 1}})") == s);
}

TEST_CASE("parse errors carry line and column") {
  std::string doc = "{\n  \"dimension\": \"1|1\",\n  \"checks\": [}\n";
  CHECK(kind_of(doc) == ErrorKind::ParseError);
  CHECK(message_of(doc).find("line 3, column 14") != std::string::npos);
}

TEST_CASE("validation errors name the violated invariant") {
  std::string asym = R"({"dimension": "1|1", "connections": {"G": {"x1,x1,th1": "th1", "x1,th1,x1": "2*th1"}}})";
  CHECK(kind_of(asym) == ErrorKind::ValidationError);
  CHECK(message_of(asym).find("(x1; x1, th1) is not graded symmetric") != std::string::npos);

  std::string parity = R"({"dimension": "1|1", "connections": {"G": {"th1,x1,th1": "th1"}}})";
  CHECK(message_of(parity).find("(th1; x1, th1) has the wrong parity") != std::string::npos);

  CHECK(kind_of(R"({"dimension": "1|1", "checks": [{"name": "a", "type": "projective_class", "connection": "G"}]})") ==
        ErrorKind::ValidationError);
  CHECK(message_of(R"({"dimension": "1|1", "checks": [{"name": "a", "type": "nope"}]})").find("unknown check type") !=
        std::string::npos);
  CHECK(message_of(R"({"dimension": "1|1", "expressions": {"x1": "1"}})").find("shadows a coordinate") != std::string::npos);
  CHECK(message_of(R"({"dimension": "1|1", "expressions": {"f": "th2"}})").find("expressions.f") != std::string::npos);
  CHECK(kind_of(R"({"dimension": "1|1", "changes": {"c": {"forward": ["x1", "th1"], "inverse": ["2*x1", "th1"]}}})") ==
        ErrorKind::ValidationError);
  CHECK(kind_of(R"({"dimension": "1|1", "rho": "th1"})") == ErrorKind::ValidationError);
  CHECK(kind_of(R"({"dimension": "1|1", "extra": 1})") == ErrorKind::ValidationError);
}

TEST_CASE("missing graded-symmetric partners are filled in") {
  Scenario s = parse_scenario(R"({"dimension": "1|1",
    "connections": {"G": {"th1,x1,th1": "x1"}},
    "tensors": {"S": {"parity": "odd", "components": {"x1,th1": "1"}}}})");
  CHECK(s.connection("G")(1, 1, 0) == parse_expression("x1", s.dim));
  CHECK(s.tensor("S")(1, 0) == SuperFunction(s.dim, 1));
}

TEST_CASE("scenario round trip on the bundled scenarios") {
  for (const char* name : {"tour_1x1.json", "isolation_2x1.json", "bv_2x2.json"}) {
    Scenario s = parse_scenario(slurp(scenario_file(name)));
    std::string emitted = emit_scenario(s);
    Scenario again = parse_scenario(emitted);
    CHECK(again == s);
    CHECK(emit_scenario(again) == emitted);
  }
}

TEST_CASE("scenario round trip on generated scenarios") {
  Generator gen(101);
  for (Dimension d : {Dimension{1, 1}, Dimension{2, 1}, Dimension{2, 2}, Dimension{3, 0}}) {
    for (int k = 0; k < 3; ++k) {
      Scenario s = random_scenario(gen, d);
      Scenario again = parse_scenario(emit_scenario(s));
      CHECK(again == s);
      CHECK(again.expressions == s.expressions);
      CHECK(again.connections == s.connections);
      CHECK(again.tensors == s.tensors);
      CHECK(again.triples == s.triples);
      CHECK(again.rho == s.rho);
      CHECK(again.checks == s.checks);
    }
  }
}

TEST_CASE("projective class of the zero connection passes with Pi = 0 recorded") {
  Scenario s = parse_scenario(R"({"dimension": "2|1", "connections": {"Z": {}},
    "checks": [{"name": "z", "type": "projective_class", "connection": "Z"}]})");
  Report r = run_checks(s);
  REQUIRE(r.results.size() == 1);
  CHECK(r.results[0].verdict == Verdict::pass);
  CHECK(r.results[0].values == std::vector<std::pair<std::string, std::string>>{{"Pi", "0"}});
}

TEST_CASE("singular dimension becomes an error verdict without stopping siblings") {
  Scenario s = parse_scenario(slurp(scenario_file("isolation_2x1.json")));
  Report r = run_checks(s);
  REQUIRE(r.results.size() == 4);
  CHECK(r.results[0].name == "class_of_G");
  CHECK(r.results[0].verdict == Verdict::pass);
  CHECK(r.results[1].verdict == Verdict::error);
  CHECK(r.results[1].error_kind == "SingularDimension");
  CHECK(r.results[2].verdict == Verdict::pass);
  CHECK(r.results[3].verdict == Verdict::pass);

  Scenario odd = parse_scenario(R"({"dimension": "1|2", "connections": {"Z": {}},
    "checks": [{"name": "z", "type": "projective_class", "connection": "Z"}]})");
  CHECK(run_checks(odd).results[0].error_kind == "SingularDimension");
}

TEST_CASE("BV scenario: Darboux passes with both verdicts, the counterexample fails with residuals") {
  Scenario s = parse_scenario(slurp(scenario_file("bv_2x2.json")));
  Report r = run_checks(s);
  const CheckResult& good = result(r, "darboux_bv");
  CHECK(good.verdict == Verdict::pass);
  const CheckResult& bad = result(r, "broken_bv");
  CHECK(bad.verdict == Verdict::fail);
  CHECK(bad.residuals[0].expression == "(1)*p_x1^3");
  std::string text = emit_report(r, ReportFormat::text);
  CHECK(text.find("NONZERO (S,S) = (1)*p_x1^3") != std::string::npos);
  CHECK(text.find("Jacobi witness") != std::string::npos);
}

TEST_CASE("only filter keeps declaration order and rejects unknown names") {
  Scenario s = parse_scenario(slurp(scenario_file("tour_1x1.json")));
  Report r = run_checks(s, {"lift", "pc"});
  REQUIRE(r.results.size() == 2);
  CHECK(r.results[0].name == "pc");
  CHECK(r.results[1].name == "lift");
  CHECK_THROWS_AS(run_checks(s, {"missing"}), Error);
}

TEST_CASE("json reports are deterministic and round trip") {
  Scenario s = parse_scenario(slurp(scenario_file("tour_1x1.json")));
  std::string a = emit_report(run_checks(s), ReportFormat::json);
  std::string b = emit_report(run_checks(parse_scenario(slurp(scenario_file("tour_1x1.json")))), ReportFormat::json);
  CHECK(a == b);
  CHECK(a.find("duration_ms") == std::string::npos);
  Report timed = run_checks(s);
  std::string with_timing = emit_report(timed, ReportFormat::json, true);
  CHECK(emit_report(parse_report(with_timing), ReportFormat::json, true) == with_timing);
  CHECK(emit_report(parse_report(a), ReportFormat::json) == a);
}

TEST_CASE("empty report is header only") {
  Report r;
  r.dimension = "1|1";
  CHECK(emit_report(r, ReportFormat::text) == "dimension 1|1\nsummary: 0 pass, 0 fail, 0 error\n");
}

TEST_CASE("command-line exit codes") {
  const std::string cli = SUPERPROJ_CLI;
  auto run = [&](const std::string& args) {
    int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("run " + scenario_file("isolation_2x1.json")) == 0);
  CHECK(run("run " + scenario_file("bv_2x2.json") + " --format json --only broken_bv") == 0);
  CHECK(run("validate " + scenario_file("tour_1x1.json")) == 0);
  CHECK(run("grammar") == 0);
  CHECK(run("validate /nonexistent.json") == 1);
  CHECK(run("run " + scenario_file("tour_1x1.json") + " --only missing") == 1);
  CHECK(run("run " + scenario_file("tour_1x1.json") + " --format yaml") == 1);
}
