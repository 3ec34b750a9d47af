#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "superproj/expression.hpp"
#include "superproj/geometry.hpp"
#include "support/changes.hpp"

using namespace superproj;
using testing::Generator;

namespace {

SuperFunction expr(const char* text, Dimension d) { return parse_expression(text, d); }

SuperMatrix random_even_matrix(Generator& gen, Dimension d) {
  SuperMatrix m(coordinate_parities(d), d);
  for (unsigned r = 0; r < d.size(); ++r)
    for (unsigned c = 0; c < d.size(); ++c) {
      m(r, c) = gen.function(d, d.parity(r) + d.parity(c), 1, 0.5);
      if (r == c) m(r, c) += SuperFunction(d, gen.integer(1, 4));
    }
  return m;
}

// Ber = det(A) / det(D - C A^-1 B), an independent route to the Berezinian.
SuperFunction berezinian_via_a(const SuperMatrix& m) {
  const Dimension& fd = m.function_dimension();
  std::vector<unsigned> ev, od;
  for (unsigned i = 0; i < m.size(); ++i) (m.parities()[i] == Parity::even ? ev : od).push_back(i);
  SuperMatrix a(IndexParities(ev.size(), Parity::even), fd);
  for (unsigned r = 0; r < ev.size(); ++r)
    for (unsigned c = 0; c < ev.size(); ++c) a(r, c) = m(ev[r], ev[c]);
  SuperMatrix a_inv = a.inverse();
  SuperMatrix s(IndexParities(od.size(), Parity::odd), fd);
  for (unsigned r = 0; r < od.size(); ++r)
    for (unsigned c = 0; c < od.size(); ++c) {
      SuperFunction v = m(od[r], od[c]);
      for (unsigned p = 0; p < ev.size(); ++p)
        for (unsigned q = 0; q < ev.size(); ++q) v -= m(od[r], ev[p]) * a_inv(p, q) * m(ev[q], od[c]);
      s(r, c) = v;
    }
  return even_determinant(a) * even_determinant(s).inverse();
}

// Classical projective class for m = 0.
Sym2CovVec classical_projective_class(const Sym2CovVec& g) {
  const unsigned n = g.size();
  const Dimension d = g.function_dimension();
  Sym2CovVec out(d);
  for (unsigned k = 0; k < n; ++k)
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = 0; j < n; ++j) {
        SuperFunction v = g(k, i, j);
        for (unsigned s = 0; s < n; ++s) {
          if (k == i) v -= g(s, s, j) * mpq_class(1, n + 1);
          if (k == j) v -= g(s, i, s) * mpq_class(1, n + 1);
        }
        out.raw(k, i, j) = v;
      }
  return out;
}

const Dimension kDims[] = {{1, 1}, {2, 1}, {2, 2}, {1, 3}};

}  // namespace

TEST_CASE("supermatrix inverse is two-sided") {
  Generator gen(21);
  for (Dimension d : kDims) {
    for (int t = 0; t < 4; ++t) {
      SuperMatrix m = random_even_matrix(gen, d);
      SuperMatrix inv = m;
      try {
        inv = m.inverse();
      } catch (const Error&) {
        continue;
      }
      SuperMatrix id = SuperMatrix::identity(coordinate_parities(d), d);
      CHECK(m * inv == id);
      CHECK(inv * m == id);
    }
  }
  SuperMatrix singular(coordinate_parities(Dimension{1, 1}), Dimension{1, 1});
  CHECK_THROWS_AS(singular.inverse(), Error);
}

TEST_CASE("Berezinian agrees with the complementary formula and is multiplicative") {
  Generator gen(22);
  for (Dimension d : kDims) {
    for (int t = 0; t < 3; ++t) {
      SuperMatrix a = random_even_matrix(gen, d), b = random_even_matrix(gen, d);
      CHECK(berezinian(a) == berezinian_via_a(a));
      CHECK(berezinian(a * b) == berezinian(a) * berezinian(b));
    }
  }
}

TEST_CASE("Jacobian of a shear with a nilpotent correction") {
  Dimension d{1, 2};
  CoordinateChange c(d, {expr("x1 + th1*th2", d), expr("th1", d), expr("th2", d)});
  SuperMatrix j = jacobian(c);
  // rows carry the derivative: d_th1 xbar = th2, d_th2 xbar = -th1
  CHECK(j(0, 0) == expr("1", d));
  CHECK(j(1, 0) == expr("th2", d));
  CHECK(j(2, 0) == expr("-th1", d));
  CHECK(j(1, 1) == expr("1", d));
  CHECK(berezinian(j) == expr("1", d));
}

TEST_CASE("chain rule and logarithmic derivative of the Berezinian") {
  Generator gen(23);
  for (Dimension d : kDims) {
    CoordinateChange f = testing::random_change(gen, d, 2);
    CoordinateChange g = testing::random_change(gen, d, 2);
    SuperMatrix jg = jacobian(g);
    SuperMatrix jg_at_f(jg.parities(), d);
    for (unsigned r = 0; r < d.size(); ++r)
      for (unsigned c = 0; c < d.size(); ++c) jg_at_f(r, c) = f.pull_back(jg(r, c));
    CHECK(jacobian(f.then(g)) == jacobian(f) * jg_at_f);

    const SuperFunction ber = berezinian(jacobian(f));
    for (unsigned i = 0; i < d.size(); ++i) CHECK(dlog_berezinian(f, i) == ber.partial(i) * ber.inverse());
  }
}

TEST_CASE("div after j is multiplication by n - m + 1") {
  Generator gen(24);
  for (Dimension d : {Dimension{1, 1}, Dimension{2, 2}, Dimension{3, 1}, Dimension{1, 3}}) {
    CovectorField phi(d);
    for (unsigned i = 0; i < d.size(); ++i) phi[i] = gen.function(d, d.parity(i));
    CovectorField back = div_trace(j_inject(phi));
    for (unsigned i = 0; i < d.size(); ++i) CHECK(back[i] == phi[i] * mpq_class(d.n0() + 1));
    j_inject(phi).validate();
  }
}

TEST_CASE("single-component examples") {
  Dimension d10{1, 0};
  CovectorField phi(d10);
  phi[0] = expr("x1^2", d10);
  CHECK(j_inject(phi)(0, 0, 0) == expr("x1^2", d10));
  Dimension d20{2, 0};
  Sym2CovVec a(d20);
  a.set(0, 0, 0, expr("x2", d20));
  CHECK(div_trace(a)[0] == expr("2*x2", d20));
}

TEST_CASE("projective class is trace-free, idempotent and matches the classical formula") {
  Generator gen(25);
  for (Dimension d : kDims) {
    Sym2CovVec g = testing::random_sym2(gen, d);
    Sym2CovVec p = projective_class(g);
    p.validate();
    CovectorField tr = div_trace(p);
    for (unsigned i = 0; i < d.size(); ++i) CHECK(tr[i].is_zero());
    CHECK(projective_class(p) == p);
    CovectorField phi(d);
    for (unsigned i = 0; i < d.size(); ++i) phi[i] = gen.function(d, d.parity(i), 1);
    CHECK(projectively_equivalent(g, g + j_inject(phi)));
  }
  for (Dimension d : {Dimension{2, 0}, Dimension{3, 0}}) {
    Sym2CovVec g = testing::random_sym2(gen, d);
    CHECK(projective_class(g) == classical_projective_class(g));
  }
  CHECK_THROWS_AS(projective_class(Sym2CovVec(Dimension{0, 1})), Error);
  CHECK_THROWS_AS(projective_class(Sym2CovVec(Dimension{1, 2})), Error);
}

TEST_CASE("graded symmetry validation names the offending component") {
  Dimension d{1, 1};
  Sym2CovVec a(d);
  a.raw(0, 1, 1) = expr("x1", d);
  try {
    a.validate();
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
    CHECK(std::string(e.what()).find("(x1; th1, th1)") != std::string::npos);
  }
}

TEST_CASE("connection transformation is functorial and graded symmetric") {
  Generator gen(26);
  for (Dimension d : kDims) {
    CoordinateChange f = testing::random_change(gen, d, 2);
    CoordinateChange g = testing::random_change(gen, d, 2);
    Sym2CovVec gamma = testing::random_sym2(gen, d);
    Sym2CovVec pulled = pullback_connection(gamma, g);
    pulled.validate();
    CHECK(pullback_connection(pulled, f) == pullback_connection(gamma, f.then(g)));
    CHECK(transform_connection(transform_connection(gamma, f), f.inverted()) == gamma);
    Sym2CovVec t = pullback_tensor(gamma, g);
    t.validate();
    CHECK(pullback_tensor(t, f) == pullback_tensor(gamma, f.then(g)));
  }
}

TEST_CASE("Schwarzian is the defect of the projective class") {
  Generator gen(27);
  for (Dimension d : kDims) {
    CoordinateChange c = testing::random_change(gen, d, 3);
    Sym2CovVec s = super_schwarzian(c);
    s.validate();
    CHECK(s == projective_class(pullback_connection(Sym2CovVec(d), c)));
    CovectorField tr = div_trace(s);
    for (unsigned i = 0; i < d.size(); ++i) CHECK(tr[i].is_zero());

    Sym2CovVec gamma = testing::random_sym2(gen, d);
    Sym2CovVec lhs = projective_class(transform_connection(gamma, c));
    Sym2CovVec rhs = pullback_tensor(projective_class(gamma), c.inverted()) + super_schwarzian(c.inverted());
    CHECK(lhs == rhs);
  }
}

TEST_CASE("Schwarzian cocycle and vanishing on affine changes") {
  Generator gen(28);
  for (Dimension d : kDims) {
    CoordinateChange f = testing::random_change(gen, d, 2);
    CoordinateChange g = testing::random_change(gen, d, 2);
    CHECK(super_schwarzian(f.then(g)) == pullback_tensor(super_schwarzian(g), f) + super_schwarzian(f));
    CoordinateChange affine = testing::random_change(gen, d, 3, 1);
    bool linear = true;
    for (const auto& comp : affine.forward())
      for (unsigned i = 0; i < d.size(); ++i)
        for (unsigned j = 0; j < d.size(); ++j) linear = linear && comp.partial(i).partial(j).is_zero();
    if (linear) CHECK(super_schwarzian(affine).is_zero());
  }
}

TEST_CASE("printed sign placement breaks trace-freeness for odd indices") {
  Dimension d{2, 2};
  CoordinateChange c(d, {expr("x1 + x1*th1*th2", d), expr("x2", d), expr("th1 + x2*th2", d), expr("th2", d)});
  Sym2CovVec printed = super_schwarzian_as_printed(c);
  Sym2CovVec fixed = super_schwarzian(c);
  CHECK_FALSE(printed == fixed);
  CovectorField tr = div_trace(printed);
  CHECK_FALSE((tr[2].is_zero() && tr[3].is_zero()));
}
