#include "superproj/checks.hpp"
#include "superproj/expression.hpp"
#include "support/changes.hpp"
#include "support/triples.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace superproj;
using testing::Generator;

namespace {

SuperFunction expr(const char* text, Dimension d) { return parse_expression(text, d); }

// Counts failed expectations and keeps the first message.
struct Tally {
  int checks = 0;
  int failures = 0;
  std::string first;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (failures++ == 0) first = what;
  }
};

template <class F>
std::optional<ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

CovectorField random_covector(Generator& gen, Dimension d) {
  CovectorField phi(d);
  for (unsigned i = 0; i < d.size(); ++i) phi[i] = gen.function(d, d.parity(i), 2);
  return phi;
}

// Classical trace-free part for m = 0.
Sym2CovVec classical_projective_class(const Sym2CovVec& g) {
  const unsigned n = g.size();
  Sym2CovVec out(g.function_dimension());
  for (unsigned k = 0; k < n; ++k)
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = 0; j < n; ++j) {
        SuperFunction v = g(k, i, j);
        for (unsigned s = 0; s < n; ++s) {
          if (k == i) v -= g(s, s, j) * ratio(1, n + 1);
          if (k == j) v -= g(s, i, s) * ratio(1, n + 1);
        }
        out.raw(k, i, j) = v;
      }
  return out;
}

// Classical projective Laplacian and upper gamma for m = 0.
DensityOperator classical_laplacian(const Bivector& s, const ProjectiveClass& pi) {
  const Dimension d = s.dimension();
  const unsigned n = d.n;
  DensityOperator op(d);
  for (unsigned i = 0; i < n; ++i) {
    SuperFunction first(d);
    for (unsigned j = 0; j < n; ++j) {
      op.add_term(s(i, j), 0, {i, j});
      first += s(i, j).partial(j) * ratio(2, n + 3);
      for (unsigned k = 0; k < n; ++k) first -= s(j, k) * pi(i, j, k) * ratio(n + 1, n + 3);
    }
    op.add_term(first, 0, {i});
  }
  return op;
}

std::vector<SuperFunction> classical_upper_gamma(const Bivector& s, const ProjectiveClass& pi) {
  const Dimension d = s.dimension();
  const unsigned n = d.n;
  std::vector<SuperFunction> out;
  for (unsigned i = 0; i < n; ++i) {
    SuperFunction v(d);
    for (unsigned j = 0; j < n; ++j) {
      v += s(j, i).partial(j);
      for (unsigned k = 0; k < n; ++k) v += s(j, k) * pi(i, k, j);
    }
    out.push_back(v * ratio(n + 1, n + 3));
  }
  return out;
}

// Classical Schwarzian for m = 0 from the chain rule: trace-free part of
// (d_i d_j xbar^s) (J^-1)^k_s, with J^-1 from the adjugate.
Sym2CovVec classical_schwarzian_2d(const CoordinateChange& c) {
  const Dimension d = c.dimension();
  const auto& y = c.forward();
  SuperFunction a = y[0].partial(0), b = y[1].partial(0), cc = y[0].partial(1), dd = y[1].partial(1);
  // J(i, s) = d_i y^s; inverse as a matrix (s, k).
  SuperFunction det_inv = (a * dd - cc * b).inverse();
  SuperFunction inv[2][2] = {{dd * det_inv, -b * det_inv}, {-cc * det_inv, a * det_inv}};
  Sym2CovVec g(d);
  for (unsigned k = 0; k < 2; ++k)
    for (unsigned i = 0; i < 2; ++i)
      for (unsigned j = 0; j < 2; ++j) {
        SuperFunction v(d);
        for (unsigned s = 0; s < 2; ++s) v += y[s].partial(i).partial(j) * inv[s][k];
        g.raw(k, i, j) = v;
      }
  return classical_projective_class(g);
}

// Random invertible constant linear change plus translation, block diagonal
// by parity: a unit lower triangular times a diagonal with nonzero entries.
CoordinateChange random_linear(Generator& gen, Dimension d) {
  std::vector<SuperFunction> fwd;
  for (unsigned a = 0; a < d.size(); ++a) {
    SuperFunction v(d);
    const unsigned lo = d.is_odd(a) ? d.n : 0;
    for (unsigned b = lo; b < a; ++b) v += SuperFunction::coordinate(d, b) * mpq_class(gen.integer(-3, 3));
    int diag = gen.integer(1, 4) * (gen.coin() ? 1 : -1);
    v += SuperFunction::coordinate(d, a) * mpq_class(diag);
    if (!d.is_odd(a)) v += SuperFunction(d, gen.integer(-2, 2));
    fwd.push_back(v);
  }
  return CoordinateChange(d, fwd);
}

Bivector darboux(Dimension d) {
  Bivector s(d, Parity::odd);
  for (unsigned k = 0; k < d.n; ++k) s.set(k, d.n + k, SuperFunction(d, 1));
  return s;
}

// gamma^i = -S^ij d_j log rho, theta = -gamma^k d_k log rho.
BracketTriple from_volume(const Bivector& s, const SuperFunction& rho) {
  const Dimension& d = s.dimension();
  BracketTriple t(d, Parity::odd, Weight(0));
  t.s = s;
  const SuperFunction inv = rho.inverse();
  std::vector<SuperFunction> l;
  for (unsigned i = 0; i < d.size(); ++i) l.push_back(rho.partial(i) * inv);
  for (unsigned i = 0; i < d.size(); ++i) {
    SuperFunction g(d);
    for (unsigned j = 0; j < d.size(); ++j) g -= s(i, j) * l[j];
    t.gamma[i] = g;
  }
  for (unsigned k = 0; k < d.size(); ++k) t.theta -= t.gamma[k] * l[k];
  return t;
}

// Explicit change in 2|0 with a rational inverse and nonzero Schwarzian.
CoordinateChange change_2x0() {
  Dimension d{2, 0};
  return CoordinateChange(d, {expr("x1 + x2^2", d), expr("x2/(1 + x2)", d)},
                          std::vector<SuperFunction>{expr("x1 - x2^2/(1 - x2)^2", d), expr("x2/(1 - x2)", d)});
}

// Explicit change in 1|1: a Moebius map in x with a non-constant odd rescaling.
CoordinateChange change_1x1() {
  Dimension d{1, 1};
  return CoordinateChange(d, {expr("x1/(1 + x1)", d), expr("th1*(1 + x1^2)", d)},
                          std::vector<SuperFunction>{expr("x1/(1 - x1)", d),
                                                     expr("th1*(1 - x1)^2/((1 - x1)^2 + x1^2)", d)});
}

bool criterion1(Tally& t) {
  Generator gen(1001);
  for (Dimension d : {Dimension{2, 0}, Dimension{1, 1}, Dimension{2, 1}, Dimension{2, 2}}) {
    const mpq_class factor(static_cast<int>(d.n) - static_cast<int>(d.m) + 1);
    for (int k = 0; k < 20; ++k) {
      CovectorField phi = random_covector(gen, d);
      CovectorField lhs = div_trace(j_inject(phi));
      for (unsigned i = 0; i < d.size(); ++i)
        t.expect(lhs[i] == phi[i] * factor, "div j(phi) != (n-m+1) phi in " + d.to_string());
    }
  }
  return t.failures == 0;
}

bool criterion2(Tally& t) {
  Generator gen(1002);
  for (Dimension d : {Dimension{2, 0}, Dimension{1, 1}, Dimension{2, 1}, Dimension{2, 2}}) {
    for (int k = 0; k < 10; ++k) {
      Sym2CovVec gamma = testing::random_sym2(gen, d, 2);
      CovectorField phi = random_covector(gen, d);
      ProjectiveClass pi = projective_class(gamma);
      t.expect(pi == projective_class(gamma + j_inject(phi)), "class changes under j(phi) in " + d.to_string());
      CovectorField tr = div_trace(pi);
      for (unsigned i = 0; i < d.size(); ++i) t.expect(tr[i].is_zero(), "div Pi != 0 in " + d.to_string());
    }
  }
  return t.failures == 0;
}

bool criterion3(Tally& t) {
  Generator gen(1003);
  for (unsigned n : {2u, 3u}) {
    Dimension d{n, 0};
    for (int k = 0; k < 5; ++k) {
      Sym2CovVec gamma = testing::random_sym2(gen, d, 2);
      ProjectiveClass pi = projective_class(gamma);
      t.expect(pi == classical_projective_class(gamma), "Pi differs from the classical formula");
      Bivector s = testing::random_bivector(gen, d, Parity::even, 2);
      t.expect(projective_laplacian(s, pi) == classical_laplacian(s, pi), "Laplacian differs from the classical one");
      t.expect(upper_gamma(s, pi) == classical_upper_gamma(s, pi), "upper gamma differs from the classical one");
    }
  }
  return t.failures == 0;
}

bool criterion4(Tally& t) {
  Generator gen(1004);
  for (Dimension d : {Dimension{2, 0}, Dimension{1, 1}, Dimension{2, 1}, Dimension{2, 2}})
    for (int k = 0; k < 10; ++k) t.expect(super_schwarzian(random_linear(gen, d)).is_zero(), "linear change with S != 0");

  CoordinateChange c20 = change_2x0(), c11 = change_1x1();
  t.expect(!super_schwarzian(c20).is_zero() && !super_schwarzian(c11).is_zero(), "explicit changes are projective");
  t.expect(super_schwarzian(c20) == classical_schwarzian_2d(c20), "2|0 Schwarzian differs from the classical chain rule");
  for (const CoordinateChange* c : {&c20, &c11}) {
    const Dimension d = c->dimension();
    t.expect(projective_class(pullback_connection(Sym2CovVec(d), *c)) == super_schwarzian(*c),
             "class of the transformed flat connection != Schwarzian in " + d.to_string());
    for (int k = 0; k < 3; ++k) {
      Sym2CovVec gamma = testing::random_sym2(gen, d, 1);
      Sym2CovVec lhs = projective_class(transform_connection(gamma, *c));
      Sym2CovVec rhs = pullback_tensor(projective_class(gamma), c->inverted()) + super_schwarzian(c->inverted());
      t.expect(lhs == rhs, "defect identity fails in " + d.to_string());
    }
  }
  Dimension d{2, 0};
  CoordinateChange g(d, {expr("x1", d), expr("x2 + x1^2", d)}, std::vector<SuperFunction>{expr("x1", d), expr("x2 - x1^2", d)});
  t.expect(super_schwarzian(c20.then(g)) == pullback_tensor(super_schwarzian(g), c20) + super_schwarzian(c20),
           "composition cocycle fails");
  return t.failures == 0;
}

bool criterion5(Tally& t) {
  Generator gen(1005);
  auto run = [&](const CoordinateChange& c, Parity sp) {
    const Dimension d = c.dimension();
    Bivector s = testing::random_bivector(gen, d, sp, 1);
    ProjectiveClass pi = projective_class(testing::random_sym2(gen, d));
    DensityOperator lap = projective_laplacian(s, pi);
    DensityOperator lap_new = projective_laplacian(transform_bivector(s, c), projective_class(transform_connection(pi, c)));
    for (const auto& f : density_test_family(d, 3, {Weight(0)})) {
      SuperFunction g = f.coefficient(0);
      t.expect(lap.apply(DensityElement(c.pull_back(g))).coefficient(0) == c.pull_back(lap_new.apply(f).coefficient(0)),
               "Laplacian not invariant in " + d.to_string() + " on " + g.to_string());
    }
  };
  run(change_2x0(), Parity::even);
  run(change_1x1(), Parity::even);
  run(change_1x1(), Parity::odd);
  return t.failures == 0;
}

bool criterion6(Tally& t) {
  Generator gen(1006);
  const Weight lambdas[] = {Weight(0), ratio(1, 2), Weight(2)};
  for (Dimension d : {Dimension{1, 1}, Dimension{2, 2}}) {
    auto family = density_test_family(d, 1, {Weight(0), ratio(1, 2)});
    for (int k = 0; k < 10; ++k) {
      const Parity eps = parity_of(k);
      const Weight lambda = lambdas[k % 3];
      BracketTriple tr = testing::random_triple(gen, d, eps, lambda);
      DensityOperator delta = canonical_operator(tr);
      const std::string where = d.to_string() + " triple " + std::to_string(k);
      t.expect(delta.apply(DensityElement(SuperFunction(d, 1))).is_zero(), "Delta(1) != 0, " + where);
      t.expect(formal_adjoint(delta) == delta, "Delta not self-adjoint, " + where);
      // Components of the generated bracket against the triple directly.
      const DensityElement vol = DensityElement::volume(d, 1);
      for (unsigned i = 0; i < d.size(); ++i) {
        const DensityElement xi(SuperFunction::coordinate(d, i));
        t.expect(generated_bracket(delta, xi, vol) == DensityElement(tr.gamma[i] * mpq_class(2), lambda + 1),
                 "{x, |Dx|} component, " + where);
        for (unsigned j = 0; j < d.size(); ++j) {
          const DensityElement xj(SuperFunction::coordinate(d, j));
          t.expect(generated_bracket(delta, xi, xj) == DensityElement(tr.s(i, j) * mpq_class(2), lambda),
                   "{x, x} component, " + where);
        }
      }
      t.expect(generated_bracket(delta, vol, vol) == DensityElement(tr.theta * mpq_class(2), lambda + 2),
               "{|Dx|, |Dx|} component, " + where);
      for (const auto& a : family)
        for (const auto& b : family)
          t.expect(generated_bracket(delta, a, b) == bracket_from_triple(tr, a, b) * mpq_class(2),
                   "generated bracket on the test family, " + where);
    }
  }
  return t.failures == 0;
}

bool criterion7(Tally& t) {
  Generator gen(1007);
  for (Dimension d : {Dimension{2, 0}, Dimension{2, 2}, Dimension{3, 1}, Dimension{1, 1}}) {
    ProjectiveClass pi = projective_class(testing::random_sym2(gen, d, 1));
    Sym2CovVec lifted = lift_projective_class(pi);
    CovectorField tr = div_trace(lifted);
    for (unsigned i = 0; i < tr.size(); ++i) t.expect(tr[i].is_zero(), "lifted class not trace-free in " + d.to_string());
    for (unsigned k = 0; k < pi.size(); ++k)
      for (unsigned i = 0; i < pi.size(); ++i)
        for (unsigned j = 0; j < pi.size(); ++j)
          t.expect(lifted(k + 1, i + 1, j + 1) == pi(k, i, j), "lifted class does not restrict in " + d.to_string());
  }
  const Weight weights[] = {Weight(0), ratio(1, 2), Weight(1), Weight(-1), ratio(2, 3)};
  for (Dimension d : {Dimension{2, 0}, Dimension{2, 2}}) {
    for (int k = 0; k < 5; ++k) {
      Bivector s = testing::random_bivector(gen, d, parity_of(k), 1);
      ProjectiveClass pi = projective_class(testing::random_sym2(gen, d, 1));
      BracketTriple tr = extend_bracket(s, weights[k], pi);
      t.expect(canonical_operator(tr) == extension_operator(tr, pi),
               "canonical operator != extension operator in " + d.to_string());
    }
  }
  for (Dimension d : {Dimension{2, 1}, Dimension{1, 2}, Dimension{1, 3}, Dimension{1, 5}}) {
    Bivector s(d, Parity::even);
    t.expect(error_kind([&] { extend_bracket(s, Weight(0), ProjectiveClass(d)); }) == ErrorKind::SingularDimension,
             "no SingularDimension for extend_bracket in " + d.to_string());
    t.expect(error_kind([&] { extension_operator(BracketTriple(d, Parity::even, Weight(0)), ProjectiveClass(d)); }) ==
                 ErrorKind::SingularDimension,
             "no SingularDimension for extension_operator in " + d.to_string());
  }
  for (Dimension d : {Dimension{2, 0}, Dimension{2, 2}, Dimension{3, 0}}) {
    const int n0 = static_cast<int>(d.n) - static_cast<int>(d.m);
    for (Weight l : {Weight(ratio(n0 + 2, n0 + 1)), Weight(ratio(n0 + 3, n0 + 1))}) {
      Bivector s(d, Parity::even);
      t.expect(error_kind([&] { extend_bracket(s, l, ProjectiveClass(d)); }) == ErrorKind::SingularWeight,
               "no SingularWeight at lambda = " + l.get_str() + " in " + d.to_string());
    }
  }
  return t.failures == 0;
}

bool criterion8(Tally& t) {
  for (Dimension d : {Dimension{1, 1}, Dimension{2, 2}}) {
    Bivector s = darboux(d);
    ProjectiveClass pi(d);
    ConditionReport r = bv_check(s, pi, 3);
    t.expect(r.verdict("formula") == true, "formula verdict fails for Darboux " + d.to_string());
    t.expect(r.verdict("direct") == true, "direct verdict fails for Darboux " + d.to_string());
    DensityOperator lap = projective_laplacian(s, pi);
    for (const auto& f : density_test_family(d, 3, {Weight(0)}))
      t.expect(lap.apply(lap.apply(f)).is_zero(), "Delta^2 does not kill " + f.to_string());
  }
  Dimension d{1, 1};
  Bivector bad = darboux(d);
  bad.set(0, 0, expr("th1", d));
  ConditionReport r = bv_check(bad, ProjectiveClass(d), 3);
  t.expect(!r.residuals.front().zero, "(S,S) vanishes for the counterexample");
  t.expect(r.verdict("formula") == false, "formula verdict passes for the counterexample");
  t.expect(r.verdict("direct") == false, "direct verdict passes for the counterexample");
  auto witness = find_jacobi_witness(master_hamiltonian(bad));
  t.expect(witness.has_value(), "no Jacobi witness for the counterexample");
  if (witness) {
    // Recompute the Jacobiator of [a,b] = (-1)^a ((S,a),b) on the witness.
    const PhaseFunction ham = master_hamiltonian(bad);
    std::function<SuperFunction(const SuperFunction&, const SuperFunction&)> odd =
        [&](const SuperFunction& a, const SuperFunction& b) {
          SuperFunction v = hamiltonian_bracket(ham, a, b);
          return a.homogeneous_parity() == Parity::odd ? -v : v;
        };
    const auto& [a, b, c] = witness->arguments;
    t.expect(!jacobiator(a, b, c, odd).is_zero(), "witness does not violate Jacobi");
  }
  return t.failures == 0;
}

bool criterion9(Tally& t, std::string& detail) {
  Generator gen(1009);
  Dimension d{1, 1};
  int satisfied = 0;
  for (int k = 0; k < 10; ++k) {
    BracketTriple tr(d, Parity::odd, Weight(0));
    if (k < 4) {
      tr = testing::random_triple(gen, d, Parity::odd, Weight(0));
    } else {
      SuperFunction rho = SuperFunction(d, gen.integer(1, 3)) + gen.function(d, Parity::even, 2);
      tr = from_volume(darboux(d), rho);
      if (k >= 7) tr.theta += gen.function(d, Parity::odd, 2, 1.0);
      if (k == 9) tr.gamma[0] += gen.function(d, Parity::odd, 1, 1.0);
    }
    ConditionReport r = density_jacobi_check(tr, 2);
    t.expect(r.verdict("formula") == r.verdict("direct"), "formula and direct disagree on triple " + std::to_string(k));
    satisfied += r.satisfied();
  }
  detail = std::to_string(satisfied) + " of 10 satisfy Jacobi";
  t.expect(satisfied > 0 && satisfied < 10, "sample does not contain both outcomes");
  return t.failures == 0;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool criterion10(Tally& t) {
  const std::string dir = SUPERPROJ_SCENARIOS;
  for (const char* name : {"tour_1x1.json", "isolation_2x1.json", "bv_2x2.json"}) {
    const std::string doc = slurp(dir + "/" + name);
    Scenario s = parse_scenario(doc);
    std::string emitted = emit_scenario(s);
    t.expect(parse_scenario(emitted) == s, std::string("round trip changes ") + name);
    t.expect(emit_scenario(parse_scenario(emitted)) == emitted, std::string("emission not canonical for ") + name);
    std::string a = emit_report(run_checks(s), ReportFormat::json);
    std::string b = emit_report(run_checks(parse_scenario(doc)), ReportFormat::json);
    t.expect(a == b, std::string("json report not deterministic for ") + name);
  }
  Report r = run_checks(parse_scenario(slurp(dir + "/isolation_2x1.json")));
  t.expect(r.results.size() == 4, "isolation scenario lost a check");
  if (r.results.size() == 4) {
    t.expect(r.results[1].verdict == Verdict::error && r.results[1].error_kind == "SingularDimension",
             "singular check not reported as SingularDimension");
    t.expect(r.results[0].verdict == Verdict::pass && r.results[2].verdict == Verdict::pass &&
                 r.results[3].verdict == Verdict::pass,
             "sibling checks did not pass");
  }
  return t.failures == 0;
}

struct Criterion {
  int id;
  const char* title;
  double bound_s;
  std::function<bool(Tally&, std::string&)> body;
};

}  // namespace

int main() {
  auto plain = [](bool (*f)(Tally&)) { return [f](Tally& t, std::string&) { return f(t); }; };
  const std::vector<Criterion> criteria{
      {1, "trace identity div j = (n-m+1) id", 1, plain(criterion1)},
      {2, "projective invariance and trace-free classes", 5, plain(criterion2)},
      {3, "classical reduction for m = 0", 5, plain(criterion3)},
      {4, "Schwarzian: linear vanishing, defect, cocycle", 10, plain(criterion4)},
      {5, "Laplacian invariance", 30, plain(criterion5)},
      {6, "canonical operator", 30, plain(criterion6)},
      {7, "Thomas consistency and singular guards", 30, plain(criterion7)},
      {8, "BV equivalence and counterexample", 60, plain(criterion8)},
      {9, "density Jacobi: obstructions vs direct", 60, criterion9},
      {10, "CLI round trip, determinism, isolation", 1, plain(criterion10)},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Tally tally;
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = c.body(tally, detail);
    } catch (const std::exception& e) {
      tally.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.bound_s;
    const bool pass = ok && tally.failures == 0 && in_time;
    failed += !pass;
    std::printf("criterion %2d %s  %-48s %d checks, %.3f s (bound %.0f s)", c.id, pass ? "PASS" : "FAIL", c.title,
                tally.checks, seconds, c.bound_s);
    if (!detail.empty()) std::printf(", %s", detail.c_str());
    if (tally.failures) std::printf(", %d failed: %s", tally.failures, tally.first.c_str());
    if (!in_time) std::printf(", over the runtime bound");
    std::printf("\n");
  }
  return failed == 0 ? 0 : 1;
}
