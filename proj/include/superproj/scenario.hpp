#pragma once

#include "superproj/poisson_bv.hpp"

#include <json.hpp>

namespace superproj {

/// One requested check: a unique name, a type and type-specific parameters
/// (references to named objects, weights, degrees).
struct CheckSpec {
  std::string name;
  std::string type;
  nlohmann::json params = nlohmann::json::object();

  friend bool operator==(const CheckSpec&, const CheckSpec&) = default;
};

/// A validated scenario document. Named objects are stored as kernel values;
/// component tables have already been type-checked against the dimension.
struct Scenario {
  Dimension dim;
  std::map<std::string, SuperFunction> expressions;
  std::map<std::string, Sym2CovVec> connections;
  std::map<std::string, Bivector> tensors;
  std::map<std::string, CoordinateChange> changes;
  std::map<std::string, BracketTriple> triples;
  std::optional<SuperFunction> rho;
  std::vector<CheckSpec> checks;

  /// Resolves an expression field: the name of an entry in `expressions`, or
  /// an expression in the grammar.
  SuperFunction expression(const std::string& text) const;
  const Sym2CovVec& connection(const std::string& name) const;
  const Bivector& tensor(const std::string& name) const;
  const CoordinateChange& change(const std::string& name) const;
  const BracketTriple& triple(const std::string& name) const;

  friend bool operator==(const Scenario& a, const Scenario& b);
};

/// Check types understood by run_checks, with their parameter names.
const std::map<std::string, std::vector<std::string>>& check_types();

/// Parses and validates a scenario document. ParseError carries line and
/// column; ValidationError names the violated invariant.
Scenario parse_scenario(std::string_view document);

/// Canonical JSON document for a scenario; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& s);

/// Coordinate index of a name such as x2 or th1 (UnknownCoordinate otherwise).
unsigned coordinate_index(const Dimension& d, const std::string& name);

}  // namespace superproj
