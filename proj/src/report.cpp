#include "superproj/report.hpp"

#include <iomanip>
#include <sstream>

namespace superproj {

using nlohmann::json;

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::error: return "error";
  }
  return "error";
}

namespace {

Verdict verdict_from(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "error") return Verdict::error;
  throw Error(ErrorKind::ParseError, "unknown verdict '" + s + "'");
}

json result_json(const CheckResult& c, bool include_timing) {
  json j{{"name", c.name}, {"type", c.type}, {"verdict", std::string(verdict_name(c.verdict))}};
  json residuals = json::array();
  for (const auto& r : c.residuals) residuals.push_back({{"label", r.label}, {"expression", r.expression}, {"zero", r.zero}});
  j["residuals"] = residuals;
  json values = json::array();
  for (const auto& [label, value] : c.values) values.push_back({{"label", label}, {"value", value}});
  j["values"] = values;
  json verdicts = json::array();
  for (const auto& [label, ok] : c.verdicts) verdicts.push_back({{"label", label}, {"holds", ok}});
  j["verdicts"] = verdicts;
  j["notes"] = c.notes;
  if (c.verdict == Verdict::error) j["error"] = {{"kind", c.error_kind}, {"message", c.error_message}};
  if (include_timing) j["duration_ms"] = c.duration_ms;
  return j;
}

}  // namespace

std::size_t Report::count(Verdict v) const {
  std::size_t k = 0;
  for (const auto& r : results) k += r.verdict == v;
  return k;
}

json report_json(const Report& r, bool include_timing) {
  json checks = json::array();
  for (const auto& c : r.results) checks.push_back(result_json(c, include_timing));
  return {{"dimension", r.dimension},
          {"checks", checks},
          {"summary",
           {{"pass", r.count(Verdict::pass)}, {"fail", r.count(Verdict::fail)}, {"error", r.count(Verdict::error)}}}};
}

std::string emit_report(const Report& r, ReportFormat format, bool include_timing) {
  if (format == ReportFormat::json) return report_json(r, include_timing).dump(2) + "\n";
  std::ostringstream out;
  out << "dimension " << r.dimension << "\n";
  for (const auto& c : r.results) {
    out << "[" << verdict_name(c.verdict) << "] " << c.name << " (" << c.type << ")";
    if (include_timing) out << " " << std::fixed << std::setprecision(1) << c.duration_ms << " ms";
    out << "\n";
    if (c.verdict == Verdict::error) out << "  error " << c.error_kind << ": " << c.error_message << "\n";
    for (const auto& res : c.residuals) out << "  " << (res.zero ? "zero    " : "NONZERO ") << res.label << " = " << res.expression << "\n";
    for (const auto& [label, ok] : c.verdicts) out << "  " << (ok ? "holds   " : "FAILS   ") << label << "\n";
    for (const auto& [label, value] : c.values) out << "  " << label << " = " << value << "\n";
    for (const auto& note : c.notes) out << "  note: " << note << "\n";
  }
  out << "summary: " << r.count(Verdict::pass) << " pass, " << r.count(Verdict::fail) << " fail, "
      << r.count(Verdict::error) << " error\n";
  return out.str();
}

Report parse_report(std::string_view document) {
  try {
    json doc = json::parse(document.begin(), document.end());
    Report r;
    r.dimension = doc.at("dimension").get<std::string>();
    for (const auto& j : doc.at("checks")) {
      CheckResult c;
      c.name = j.at("name").get<std::string>();
      c.type = j.at("type").get<std::string>();
      c.verdict = verdict_from(j.at("verdict").get<std::string>());
      for (const auto& res : j.at("residuals"))
        c.residuals.push_back({res.at("label").get<std::string>(), res.at("expression").get<std::string>(),
                               res.at("zero").get<bool>()});
      for (const auto& v : j.at("values")) c.values.emplace_back(v.at("label").get<std::string>(), v.at("value").get<std::string>());
      for (const auto& v : j.at("verdicts")) c.verdicts.emplace_back(v.at("label").get<std::string>(), v.at("holds").get<bool>());
      c.notes = j.at("notes").get<std::vector<std::string>>();
      if (j.contains("error")) {
        c.error_kind = j["error"].at("kind").get<std::string>();
        c.error_message = j["error"].at("message").get<std::string>();
      }
      if (j.contains("duration_ms")) c.duration_ms = j["duration_ms"].get<double>();
      r.results.push_back(std::move(c));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("report: ") + e.what());
  }
}

}  // namespace superproj
