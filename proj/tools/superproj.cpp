#include "superproj/checks.hpp"
#include "superproj/expression.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace superproj;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string grammar_text() {
  std::ostringstream out;
  out << expression_grammar() << "\n\nCheck types and parameters:\n";
  for (const auto& [type, params] : check_types()) {
    out << "  " << type;
    for (const auto& p : params) out << " " << p;
    out << "\n";
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact checks for projective structures and odd brackets on supermanifolds"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string format = "text";
  std::vector<std::string> only;
  bool timing = false;
  auto* run = app.add_subcommand("run", "Run the checks of a scenario and print a report");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  run->add_option("--only", only, "Run only the named checks");
  run->add_flag("--timing", timing, "Include per-check durations");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario");
  validate->add_option("scenario", validate_path, "Scenario JSON file")->required();

  auto* grammar = app.add_subcommand("grammar", "Print the expression grammar and the check types");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*grammar) {
      std::cout << grammar_text();
      return 0;
    }
    if (*validate) {
      Scenario s = parse_scenario(read_file(validate_path));
      std::cout << "valid: dimension " << s.dim.to_string() << ", " << s.checks.size() << " checks\n";
      return 0;
    }
    Scenario s = parse_scenario(read_file(scenario_path));
    Report r = run_checks(s, only);
    std::cout << emit_report(r, format == "json" ? ReportFormat::json : ReportFormat::text, timing);
    return 0;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ValidationError ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
