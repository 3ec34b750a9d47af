#pragma once

#include "superproj/poisson_bv.hpp"

#include <json.hpp>

namespace superproj {

enum class Verdict { pass, fail, error };

std::string_view verdict_name(Verdict v);

/// Outcome of one named check. An error result records the kind and message
/// of the exception that stopped the check.
struct CheckResult {
  std::string name;
  std::string type;
  Verdict verdict = Verdict::pass;
  std::vector<Residual> residuals;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::pair<std::string, bool>> verdicts;
  std::vector<std::string> notes;
  std::string error_kind;
  std::string error_message;
  double duration_ms = 0;
};

struct Report {
  std::string dimension;
  std::vector<CheckResult> results;

  std::size_t count(Verdict v) const;
};

enum class ReportFormat { text, json };

/// Timing is left out unless requested so that reports are deterministic.
std::string emit_report(const Report& r, ReportFormat format, bool include_timing = false);

nlohmann::json report_json(const Report& r, bool include_timing = false);

/// Inverse of the JSON form of emit_report.
Report parse_report(std::string_view document);

}  // namespace superproj
