#include "superproj/scenario.hpp"

#include "superproj/expression.hpp"

#include <regex>
#include <set>

namespace superproj {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ValidationError, what); }

std::string detail(const Error& e) {
  const std::string what = e.what(), prefix = std::string(kind_name(e.kind())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) invalid(where + ": missing field '" + key + "'");
  return *it;
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) invalid(where + ": expected a string");
  return v.get<std::string>();
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) invalid(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok |= key == a;
    if (!ok) invalid(where + ": unknown field '" + key + "'");
  }
}

std::vector<unsigned> index_tuple(const Dimension& d, const std::string& key, std::size_t arity, const std::string& where) {
  std::vector<unsigned> out;
  std::size_t start = 0;
  while (start <= key.size()) {
    std::size_t comma = key.find(',', start);
    if (comma == std::string::npos) comma = key.size();
    std::string part = key.substr(start, comma - start);
    part.erase(0, part.find_first_not_of(' '));
    part.erase(part.find_last_not_of(' ') + 1);
    try {
      out.push_back(coordinate_index(d, part));
    } catch (const Error&) {
      invalid(where + ": unknown coordinate '" + part + "' in index '" + key + "'");
    }
    start = comma + 1;
  }
  if (out.size() != arity) invalid(where + ": index '" + key + "' needs " + std::to_string(arity) + " coordinates");
  return out;
}

Parity parse_parity(const json& v, const std::string& where) {
  const std::string s = as_string(v, where);
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  invalid(where + ": parity must be 'even' or 'odd'");
}

Weight parse_weight(const json& v, const std::string& where) {
  std::string s;
  if (v.is_number_integer()) s = std::to_string(v.get<long>());
  else s = as_string(v, where);
  static const std::regex pattern(R"(-?\d+(/\d+)?)");
  if (!std::regex_match(s, pattern)) invalid(where + ": weight must be an integer or p/q");
  Weight w(s);
  if (w.get_den() == 0) invalid(where + ": zero denominator");
  w.canonicalize();
  return w;
}

std::string weight_text(const Weight& w) { return w.get_str(); }

std::string parity_text(Parity p) { return p == Parity::odd ? "odd" : "even"; }

Sym2CovVec parse_connection(const Scenario& s, const json& table, const std::string& where) {
  if (!table.is_object()) invalid(where + ": expected a component table");
  const Dimension& d = s.dim;
  Sym2CovVec g(d);
  std::set<std::vector<unsigned>> given;
  for (const auto& [key, value] : table.items()) {
    auto idx = index_tuple(d, key, 3, where);
    if (!given.insert(idx).second) invalid(where + ": duplicate index '" + key + "'");
    g.raw(idx[0], idx[1], idx[2]) = s.expression(as_string(value, where + "[" + key + "]"));
  }
  for (const auto& idx : given) {
    const std::vector<unsigned> partner{idx[0], idx[2], idx[1]};
    if (given.count(partner)) continue;
    const SuperFunction& v = g(idx[0], idx[1], idx[2]);
    g.raw(idx[0], idx[2], idx[1]) = koszul(d.parity(idx[1]), d.parity(idx[2])) < 0 ? -v : v;
  }
  try {
    g.validate(Parity::even);
  } catch (const Error& e) {
    invalid(where + ": " + detail(e));
  }
  return g;
}

Bivector parse_bivector(const Scenario& s, const json& obj, const std::string& where) {
  only_keys(obj, {"parity", "components"}, where);
  const Dimension& d = s.dim;
  Bivector b(d, obj.contains("parity") ? parse_parity(obj["parity"], where + ".parity") : Parity::even);
  const json& table = require(obj, "components", where);
  if (!table.is_object()) invalid(where + ".components: expected a component table");
  std::set<std::vector<unsigned>> given;
  for (const auto& [key, value] : table.items()) {
    auto idx = index_tuple(d, key, 2, where);
    if (!given.insert(idx).second) invalid(where + ": duplicate index '" + key + "'");
    b.raw(idx[0], idx[1]) = s.expression(as_string(value, where + "[" + key + "]"));
  }
  for (const auto& idx : given) {
    if (given.count({idx[1], idx[0]})) continue;
    const SuperFunction& v = b(idx[0], idx[1]);
    b.raw(idx[1], idx[0]) = koszul(d.parity(idx[0]), d.parity(idx[1])) < 0 ? -v : v;
  }
  try {
    b.validate();
  } catch (const Error& e) {
    invalid(where + ": " + detail(e));
  }
  return b;
}

std::vector<SuperFunction> parse_components(const Scenario& s, const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != s.dim.size())
    invalid(where + ": expected " + std::to_string(s.dim.size()) + " expressions");
  std::vector<SuperFunction> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(s.expression(as_string(arr[i], where + "[" + std::to_string(i) + "]")));
  return out;
}

json connection_json(const Sym2CovVec& g) {
  json table = json::object();
  const Dimension& d = g.function_dimension();
  for (unsigned k = 0; k < g.size(); ++k)
    for (unsigned i = 0; i < g.size(); ++i)
      for (unsigned j = i; j < g.size(); ++j)
        if (!g(k, i, j).is_zero())
          table[d.coordinate_name(k) + "," + d.coordinate_name(i) + "," + d.coordinate_name(j)] = g(k, i, j).to_string();
  return table;
}

json bivector_json(const Bivector& b) {
  json table = json::object();
  const Dimension& d = b.dimension();
  for (unsigned i = 0; i < d.size(); ++i)
    for (unsigned j = i; j < d.size(); ++j)
      if (!b(i, j).is_zero()) table[d.coordinate_name(i) + "," + d.coordinate_name(j)] = b(i, j).to_string();
  return {{"parity", parity_text(b.parity())}, {"components", table}};
}

json functions_json(const std::vector<SuperFunction>& fs) {
  json arr = json::array();
  for (const auto& f : fs) arr.push_back(f.to_string());
  return arr;
}

bool is_identifier(const std::string& s) {
  static const std::regex pattern(R"([A-Za-z_][A-Za-z0-9_]*)");
  return std::regex_match(s, pattern);
}

void validate_check(const Scenario& s, const CheckSpec& c, const std::string& where) {
  const auto& types = check_types();
  auto it = types.find(c.type);
  if (it == types.end()) invalid(where + ": unknown check type '" + c.type + "'");
  for (const auto& [key, value] : c.params.items()) {
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
      invalid(where + ": check type '" + c.type + "' has no parameter '" + key + "'");
    const std::string field = where + "." + key;
    if (key == "connection" || key == "other") s.connection(as_string(value, field));
    else if (key == "tensor") s.tensor(as_string(value, field));
    else if (key == "change" || key == "first" || key == "second") s.change(as_string(value, field));
    else if (key == "triple") s.triple(as_string(value, field));
    else if (key == "rho") s.expression(as_string(value, field));
    else if (key == "weight") parse_weight(value, field);
    else if (key == "max_degree") {
      if (!value.is_number_unsigned() || value.get<unsigned>() > 4) invalid(field + ": expected an integer in 0..4");
    }
  }
  static const std::map<std::string, std::vector<std::string>> required{
      {"projective_class", {"connection"}},
      {"projectively_equivalent", {"connection", "other"}},
      {"schwarzian", {"change"}},
      {"schwarzian_cocycle", {"first", "second"}},
      {"laplacian_invariance", {"tensor", "change"}},
      {"canonical_operator", {"triple"}},
      {"thomas_lift", {}},
      {"extension_consistency", {"tensor"}},
      {"bv_check", {"tensor"}},
      {"density_jacobi", {"triple"}},
      {"symplectic_canonical", {"triple"}},
      {"projective_poisson", {"tensor"}},
  };
  for (const auto& key : required.at(c.type))
    if (!c.params.contains(key)) invalid(where + ": check type '" + c.type + "' requires '" + key + "'");
}

}  // namespace

unsigned coordinate_index(const Dimension& d, const std::string& name) {
  for (unsigned i = 0; i < d.size(); ++i)
    if (d.coordinate_name(i) == name) return i;
  throw Error(ErrorKind::UnknownCoordinate, "no coordinate named '" + name + "' in dimension " + d.to_string());
}

const std::map<std::string, std::vector<std::string>>& check_types() {
  static const std::map<std::string, std::vector<std::string>> types{
      {"projective_class", {"connection"}},
      {"projectively_equivalent", {"connection", "other"}},
      {"schwarzian", {"change", "connection"}},
      {"schwarzian_cocycle", {"first", "second"}},
      {"laplacian_invariance", {"tensor", "connection", "change", "max_degree"}},
      {"canonical_operator", {"triple", "max_degree"}},
      {"thomas_lift", {"connection"}},
      {"extension_consistency", {"tensor", "connection", "weight"}},
      {"bv_check", {"tensor", "connection", "max_degree"}},
      {"density_jacobi", {"triple", "max_degree"}},
      {"symplectic_canonical", {"triple", "rho"}},
      {"projective_poisson", {"tensor", "connection", "rho"}},
  };
  return types;
}

SuperFunction Scenario::expression(const std::string& text) const {
  auto it = expressions.find(text);
  if (it != expressions.end()) return it->second;
  try {
    return parse_expression(text, dim);
  } catch (const Error& e) {
    invalid("expression '" + text + "': " + detail(e));
  }
}

const Sym2CovVec& Scenario::connection(const std::string& name) const {
  auto it = connections.find(name);
  if (it == connections.end()) invalid("unknown connection '" + name + "'");
  return it->second;
}

const Bivector& Scenario::tensor(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) invalid("unknown tensor '" + name + "'");
  return it->second;
}

const CoordinateChange& Scenario::change(const std::string& name) const {
  auto it = changes.find(name);
  if (it == changes.end()) invalid("unknown change '" + name + "'");
  return it->second;
}

const BracketTriple& Scenario::triple(const std::string& name) const {
  auto it = triples.find(name);
  if (it == triples.end()) invalid("unknown triple '" + name + "'");
  return it->second;
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (!(a.dim == b.dim) || a.expressions != b.expressions || a.connections != b.connections || a.tensors != b.tensors ||
      a.triples != b.triples || a.rho != b.rho || a.checks != b.checks || a.changes.size() != b.changes.size())
    return false;
  for (const auto& [name, c] : a.changes) {
    auto it = b.changes.find(name);
    if (it == b.changes.end() || c.forward() != it->second.forward() || c.inverse() != it->second.inverse()) return false;
  }
  return true;
}

Scenario parse_scenario(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    std::string message = e.what();
    if (auto at = message.find(": ", message.find("column")); at != std::string::npos) message = message.substr(at + 2);
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < document.size(); ++i) {
      if (document[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message);
  }
  only_keys(doc, {"dimension", "expressions", "connections", "tensors", "changes", "triples", "rho", "checks"}, "scenario");

  Scenario s;
  json dim = require(doc, "dimension", "scenario");
  if (dim.is_string()) {
    static const std::regex pattern(R"((\d+)\|(\d+))");
    std::smatch match;
    const std::string text = dim.get<std::string>();
    if (!std::regex_match(text, match, pattern)) invalid("dimension: expected 'n|m' or {\"n\": n, \"m\": m}");
    dim = {{"n", std::stoul(match[1].str())}, {"m", std::stoul(match[2].str())}};
  }
  only_keys(dim, {"n", "m"}, "dimension");
  const json& n = require(dim, "n", "dimension");
  const json& m = require(dim, "m", "dimension");
  if (!n.is_number_unsigned() || !m.is_number_unsigned()) invalid("dimension: n and m must be non-negative integers");
  if (m.get<unsigned>() > 16 || n.get<unsigned>() > 16) invalid("dimension: at most 16 coordinates of each parity");
  s.dim = Dimension{n.get<unsigned>(), m.get<unsigned>()};

  if (doc.contains("expressions")) {
    const json& exprs = doc["expressions"];
    if (!exprs.is_object()) invalid("expressions: expected an object");
    for (const auto& [name, value] : exprs.items()) {
      if (!is_identifier(name)) invalid("expressions: '" + name + "' is not an identifier");
      bool coordinate = true;
      try {
        coordinate_index(s.dim, name);
      } catch (const Error&) {
        coordinate = false;
      }
      if (coordinate) invalid("expressions: '" + name + "' shadows a coordinate");
      try {
        s.expressions.emplace(name, parse_expression(as_string(value, "expressions." + name), s.dim));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::ValidationError) throw;
        invalid("expressions." + name + ": " + detail(e));
      }
    }
  }
  if (doc.contains("connections")) {
    const json& conns = doc["connections"];
    if (!conns.is_object()) invalid("connections: expected an object");
    for (const auto& [name, table] : conns.items()) s.connections.emplace(name, parse_connection(s, table, "connections." + name));
  }
  if (doc.contains("tensors")) {
    const json& ts = doc["tensors"];
    if (!ts.is_object()) invalid("tensors: expected an object");
    for (const auto& [name, obj] : ts.items()) s.tensors.emplace(name, parse_bivector(s, obj, "tensors." + name));
  }
  if (doc.contains("changes")) {
    const json& cs = doc["changes"];
    if (!cs.is_object()) invalid("changes: expected an object");
    for (const auto& [name, obj] : cs.items()) {
      const std::string where = "changes." + name;
      only_keys(obj, {"forward", "inverse"}, where);
      auto fwd = parse_components(s, require(obj, "forward", where), where + ".forward");
      std::optional<std::vector<SuperFunction>> inv;
      if (obj.contains("inverse")) inv = parse_components(s, obj["inverse"], where + ".inverse");
      try {
        s.changes.emplace(name, CoordinateChange(s.dim, std::move(fwd), std::move(inv)));
      } catch (const Error& e) {
        invalid(where + ": " + detail(e));
      }
    }
  }
  if (doc.contains("triples")) {
    const json& ts = doc["triples"];
    if (!ts.is_object()) invalid("triples: expected an object");
    for (const auto& [name, obj] : ts.items()) {
      const std::string where = "triples." + name;
      only_keys(obj, {"S", "gamma", "theta", "weight"}, where);
      const json& sj = require(obj, "S", where);
      Bivector b = sj.is_string() ? s.tensor(sj.get<std::string>()) : parse_bivector(s, sj, where + ".S");
      std::vector<SuperFunction> gamma = obj.contains("gamma") ? parse_components(s, obj["gamma"], where + ".gamma")
                                                               : std::vector<SuperFunction>(s.dim.size(), SuperFunction(s.dim));
      SuperFunction theta = obj.contains("theta") ? s.expression(as_string(obj["theta"], where + ".theta")) : SuperFunction(s.dim);
      Weight w = obj.contains("weight") ? parse_weight(obj["weight"], where + ".weight") : Weight(0);
      BracketTriple t(std::move(b), std::move(gamma), std::move(theta), w);
      try {
        t.validate();
      } catch (const Error& e) {
        invalid(where + ": " + detail(e));
      }
      s.triples.emplace(name, std::move(t));
    }
  }
  if (doc.contains("rho")) {
    s.rho = s.expression(as_string(doc["rho"], "rho"));
    if (!s.rho->has_parity(Parity::even) || s.rho->body().is_zero()) invalid("rho: a volume form must be even and invertible");
  }
  if (doc.contains("checks")) {
    const json& cs = doc["checks"];
    if (!cs.is_array()) invalid("checks: expected an array");
    std::set<std::string> names;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const std::string where = "checks[" + std::to_string(k) + "]";
      const json& c = cs[k];
      if (!c.is_object()) invalid(where + ": expected an object");
      CheckSpec spec;
      spec.name = as_string(require(c, "name", where), where + ".name");
      spec.type = as_string(require(c, "type", where), where + ".type");
      if (!names.insert(spec.name).second) invalid(where + ": duplicate check name '" + spec.name + "'");
      for (const auto& [key, value] : c.items())
        if (key != "name" && key != "type") spec.params[key] = value;
      validate_check(s, spec, where + " (" + spec.name + ")");
      s.checks.push_back(std::move(spec));
    }
  }
  return s;
}

std::string emit_scenario(const Scenario& s) {
  json doc;
  doc["dimension"] = {{"n", s.dim.n}, {"m", s.dim.m}};
  if (!s.expressions.empty()) {
    json e = json::object();
    for (const auto& [name, f] : s.expressions) e[name] = f.to_string();
    doc["expressions"] = e;
  }
  if (!s.connections.empty()) {
    json c = json::object();
    for (const auto& [name, g] : s.connections) c[name] = connection_json(g);
    doc["connections"] = c;
  }
  if (!s.tensors.empty()) {
    json t = json::object();
    for (const auto& [name, b] : s.tensors) t[name] = bivector_json(b);
    doc["tensors"] = t;
  }
  if (!s.changes.empty()) {
    json c = json::object();
    for (const auto& [name, ch] : s.changes) {
      json entry{{"forward", functions_json(ch.forward())}};
      if (ch.inverse()) entry["inverse"] = functions_json(*ch.inverse());
      c[name] = entry;
    }
    doc["changes"] = c;
  }
  if (!s.triples.empty()) {
    json t = json::object();
    for (const auto& [name, tr] : s.triples)
      t[name] = {{"S", bivector_json(tr.s)},
                 {"gamma", functions_json(tr.gamma)},
                 {"theta", tr.theta.to_string()},
                 {"weight", weight_text(tr.lambda)}};
    doc["triples"] = t;
  }
  if (s.rho) doc["rho"] = s.rho->to_string();
  json checks = json::array();
  for (const auto& c : s.checks) {
    json entry = c.params;
    entry["name"] = c.name;
    entry["type"] = c.type;
    checks.push_back(entry);
  }
  doc["checks"] = checks;
  return doc.dump(2) + "\n";
}

}  // namespace superproj
