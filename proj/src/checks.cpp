#include "superproj/checks.hpp"

#include <chrono>

namespace superproj {

namespace {

const nlohmann::json* param(const CheckSpec& spec, const char* key) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? nullptr : &*it;
}

std::string text_param(const CheckSpec& spec, const char* key) { return param(spec, key)->get<std::string>(); }

unsigned degree_param(const CheckSpec& spec, unsigned fallback) {
  const auto* p = param(spec, "max_degree");
  return p ? p->get<unsigned>() : fallback;
}

Weight weight_param(const CheckSpec& spec) {
  const auto* p = param(spec, "weight");
  if (!p) return Weight(0);
  Weight w(p->is_string() ? p->get<std::string>() : std::to_string(p->get<long>()));
  w.canonicalize();
  return w;
}

ProjectiveClass class_param(const Scenario& s, const CheckSpec& spec) {
  const auto* p = param(spec, "connection");
  return p ? projective_class(s.connection(p->get<std::string>())) : ProjectiveClass(s.dim);
}

SuperFunction rho_param(const Scenario& s, const CheckSpec& spec) {
  if (const auto* p = param(spec, "rho")) return s.expression(p->get<std::string>());
  return s.rho ? *s.rho : SuperFunction(s.dim, 1);
}

const CoordinateChange& invertible_change(const Scenario& s, const std::string& name) {
  const CoordinateChange& c = s.change(name);
  if (!c.has_inverse()) throw Error(ErrorKind::ValidationError, "change '" + name + "' needs an inverse");
  return c;
}

std::string index_name(const Sym2CovVec& a, unsigned i) {
  const Dimension& d = a.function_dimension();
  if (a.size() == d.size()) return d.coordinate_name(i);
  return i == 0 ? "x0" : d.coordinate_name(i - 1);
}

void add_components(CheckResult& r, const std::string& symbol, const Sym2CovVec& a) {
  if (a.is_zero()) {
    r.values.emplace_back(symbol, "0");
    return;
  }
  for (unsigned k = 0; k < a.size(); ++k)
    for (unsigned i = 0; i < a.size(); ++i)
      for (unsigned j = i; j < a.size(); ++j)
        if (!a(k, i, j).is_zero())
          r.values.emplace_back(symbol + "^" + index_name(a, k) + "_" + index_name(a, i) + "," + index_name(a, j),
                                a(k, i, j).to_string());
}

void add_trace(CheckResult& r, const std::string& symbol, const Sym2CovVec& a) {
  CovectorField tr = div_trace(a);
  for (unsigned i = 0; i < tr.size(); ++i)
    r.residuals.push_back({"div " + symbol + "_" + index_name(a, i), tr[i].to_string(), tr[i].is_zero()});
}

void add_difference(CheckResult& r, const std::string& label, const Sym2CovVec& lhs, const Sym2CovVec& rhs) {
  const bool same = lhs == rhs;
  r.verdicts.emplace_back(label, same);
  if (same) return;
  for (unsigned k = 0; k < lhs.size(); ++k)
    for (unsigned i = 0; i < lhs.size(); ++i)
      for (unsigned j = 0; j < lhs.size(); ++j) {
        SuperFunction diff = lhs(k, i, j) - rhs(k, i, j);
        if (diff.is_zero()) continue;
        r.notes.push_back(label + ": first difference at (" + index_name(lhs, k) + "; " + index_name(lhs, i) + ", " +
                          index_name(lhs, j) + ") = " + diff.to_string());
        return;
      }
}

void absorb(CheckResult& r, const ConditionReport& c) {
  r.residuals.insert(r.residuals.end(), c.residuals.begin(), c.residuals.end());
  r.verdicts.insert(r.verdicts.end(), c.verdicts.begin(), c.verdicts.end());
  r.notes.insert(r.notes.end(), c.notes.begin(), c.notes.end());
}

void projective_class_check(const Scenario& s, const CheckSpec& spec, CheckResult& r) {
  const Connection& gamma = s.connection(text_param(spec, "connection"));
  ProjectiveClass pi = projective_class(gamma);
  add_trace(r, "Pi", pi);
  r.verdicts.emplace_back("idempotent", projective_class(pi) == pi);
  CovectorField div = div_trace(gamma);
  CovectorField phi(s.dim);
  for (unsigned i = 0; i < div.size(); ++i) phi[i] = div[i] * ratio(1, pi.n0() + 1);
  add_difference(r, "Gamma - Pi = j(div Gamma)/(n-m+1)", gamma - pi, j_inject(phi));
  add_components(r, "Pi", pi);
}

void equivalence_check(const Scenario& s, const CheckSpec& spec, CheckResult& r) {
  const Connection& a = s.connection(text_param(spec, "connection"));
  const Connection& b = s.connection(text_param(spec, "other"));
  r.verdicts.emplace_back("projectively equivalent", projectively_equivalent(a, b));
  add_difference(r, "equal projective classes", projective_class(a), projective_class(b));
}

void schwarzian_check(const Scenario& s, const CheckSpec& spec, CheckResult& r) {
  const std::string name = text_param(spec, "change");
  const CoordinateChange& c = s.change(name);
  Sym2CovVec sch = super_schwarzian(c);
  add_trace(r, "S", sch);
  add_difference(r, "class of the pulled-back flat connection", sch, projective_class(pullback_connection(Sym2CovVec(s.dim), c)));
  if (const auto* p = param(spec, "connection")) {
    const Connection& gamma = s.connection(p->get<std::string>());
    const CoordinateChange& ci = invertible_change(s, name);
    Sym2CovVec lhs = projective_class(transform_connection(gamma, ci));
    Sym2CovVec rhs = pullback_tensor(projective_class(gamma), ci.inverted()) + super_schwarzian(ci.inverted());
    add_difference(r, "defect identity", lhs, rhs);
  }
  add_components(r, "S", sch);
}

void cocycle_check(const Scenario& s, const CheckSpec& spec, CheckResult& r) {
  const CoordinateChange& f = s.change(text_param(spec, "first"));
  const CoordinateChange& g = s.change(text_param(spec, "second"));
  add_difference(r, "cocycle", super_schwarzian(f.then(g)), pullback_tensor(super_schwarzian(g), f) + super_schwarzian(f));
}

void laplacian_invariance_check(const Scenario& s, const CheckSpec& spec, CheckResult& r) {
  const Bivector& b = s.tensor(text_param(spec, "tensor"));
  ProjectiveClass pi = class_param(s, spec);
  const CoordinateChange& c = invertible_change(s, text_param(spec, "change"));
  DensityOperator lap = projective_laplacian(b, pi);
  DensityOperator lap_new = projective_laplacian(transform_bivector(b, c), projective_class(transform_connection(pi, c)));
  const auto family = density_test_family(s.dim, degree_param(spec, 3), {Weight(0)});
  bool invariant = true;
  for (const auto& f : family) {
    SuperFunction g = f.coefficient(0);
    SuperFunction lhs = lap.apply(DensityElement(c.pull_back(g))).coefficient(0);
    SuperFunction rhs = c.pull_back(lap_new.apply(f).coefficient(0));
    if (lhs == rhs) continue;
    invariant = false;
    r.notes.push_back("differs on " + g.to_string() + ": " + (lhs - rhs).to_string());
    break;
  }
  r.verdicts.emplace_back("invariant on " + std::to_string(family.size()) + " test functions", invariant);
  r.values.emplace_back("Laplacian", lap.to_string());
}

void canonical_operator_check(const Scenario& s, const CheckSpec& spec, CheckResult& r) {
  const BracketTriple& t = s.triple(text_param(spec, "triple"));
  DensityOperator delta = canonical_operator(t);
  r.verdicts.emplace_back("annihilates 1", delta.apply(DensityElement(SuperFunction(s.dim, 1))).is_zero());
  r.verdicts.emplace_back("self-adjoint", formal_adjoint(delta) == delta);
  const auto family = density_test_family(s.dim, degree_param(spec, 1), default_test_weights());
  bool generates = true;
  for (const auto& a : family) {
    for (const auto& b : family) {
      if (generated_bracket(delta, a, b) == bracket_from_triple(t, a, b) * mpq_class(2)) continue;
      generates = false;
      r.notes.push_back("generated bracket differs on (" + a.to_string() + ", " + b.to_string() + ")");
      break;
    }
    if (!generates) break;
  }
  r.verdicts.emplace_back("generates twice the triple bracket", generates);
  r.values.emplace_back("Delta", delta.to_string());
}

void thomas_lift_check(const Scenario& s, const CheckSpec& spec, CheckResult& r) {
  ProjectiveClass pi = class_param(s, spec);
  Sym2CovVec lifted = lift_projective_class(pi);
  add_trace(r, "Pt", lifted);
  bool restricts = true;
  for (unsigned k = 0; k < pi.size(); ++k)
    for (unsigned i = 0; i < pi.size(); ++i)
      for (unsigned j = 0; j < pi.size(); ++j) restricts = restricts && lifted(k + 1, i + 1, j + 1) == pi(k, i, j);
  r.verdicts.emplace_back("restricts to Pi", restricts);
  add_difference(r, "class of the lifted connection", lifted, projective_class(lift_connection(pi)));
  add_components(r, "Pt", lifted);
}

void extension_consistency_check(const Scenario& s, const CheckSpec& spec, CheckResult& r) {
  const Bivector& b = s.tensor(text_param(spec, "tensor"));
  ProjectiveClass pi = class_param(s, spec);
  BracketTriple t = extend_bracket(b, weight_param(spec), pi);
  DensityOperator canonical = canonical_operator(t);
  DensityOperator extension = extension_operator(t, pi);
  r.verdicts.emplace_back("canonical operator equals extension operator", canonical == extension);
  if (!(canonical == extension)) r.notes.push_back("difference: " + (canonical - extension).to_string());
  for (unsigned i = 0; i < t.gamma.size(); ++i) r.values.emplace_back("gamma^" + s.dim.coordinate_name(i), t.gamma[i].to_string());
  r.values.emplace_back("theta", t.theta.to_string());
}

void run_body(const Scenario& s, const CheckSpec& spec, CheckResult& r) {
  const std::string& type = spec.type;
  if (type == "projective_class") projective_class_check(s, spec, r);
  else if (type == "projectively_equivalent") equivalence_check(s, spec, r);
  else if (type == "schwarzian") schwarzian_check(s, spec, r);
  else if (type == "schwarzian_cocycle") cocycle_check(s, spec, r);
  else if (type == "laplacian_invariance") laplacian_invariance_check(s, spec, r);
  else if (type == "canonical_operator") canonical_operator_check(s, spec, r);
  else if (type == "thomas_lift") thomas_lift_check(s, spec, r);
  else if (type == "extension_consistency") extension_consistency_check(s, spec, r);
  else if (type == "bv_check")
    absorb(r, bv_check(s.tensor(text_param(spec, "tensor")), class_param(s, spec), degree_param(spec, 3)));
  else if (type == "density_jacobi")
    absorb(r, density_jacobi_check(s.triple(text_param(spec, "triple")), degree_param(spec, 1)));
  else if (type == "symplectic_canonical")
    absorb(r, symplectic_canonical_check(s.triple(text_param(spec, "triple")), rho_param(s, spec)));
  else if (type == "projective_poisson")
    absorb(r, projective_poisson_check(s.tensor(text_param(spec, "tensor")), class_param(s, spec), rho_param(s, spec)));
  else throw Error(ErrorKind::ValidationError, "unknown check type '" + type + "'");
}

std::string strip_kind(const std::string& what, std::string_view kind) {
  const std::string prefix = std::string(kind) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

}  // namespace

CheckResult run_check(const Scenario& s, const CheckSpec& spec) {
  CheckResult r;
  r.name = spec.name;
  r.type = spec.type;
  run_body(s, spec, r);
  bool ok = true;
  for (const auto& res : r.residuals) ok = ok && res.zero;
  for (const auto& v : r.verdicts) ok = ok && v.second;
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  return r;
}

Report run_checks(const Scenario& s, const std::vector<std::string>& only) {
  for (const auto& name : only) {
    bool known = false;
    for (const auto& c : s.checks) known = known || c.name == name;
    if (!known) throw Error(ErrorKind::ValidationError, "no check named '" + name + "'");
  }
  Report report;
  report.dimension = s.dim.to_string();
  for (const auto& spec : s.checks) {
    if (!only.empty() && std::find(only.begin(), only.end(), spec.name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = run_check(s, spec);
    } catch (const Error& e) {
      r = CheckResult{};
      r.name = spec.name;
      r.type = spec.type;
      r.verdict = Verdict::error;
      r.error_kind = std::string(kind_name(e.kind()));
      r.error_message = strip_kind(e.what(), kind_name(e.kind()));
    } catch (const std::exception& e) {
      r = CheckResult{};
      r.name = spec.name;
      r.type = spec.type;
      r.verdict = Verdict::error;
      r.error_kind = "InternalError";
      r.error_message = e.what();
    }
    r.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.results.push_back(std::move(r));
  }
  return report;
}

}  // namespace superproj
