#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "superproj/rational_function.hpp"
#include "support/random.hpp"

using namespace superproj;

namespace {

const Polynomial x = Polynomial::variable(0);
const Polynomial y = Polynomial::variable(1);
const Polynomial z = Polynomial::variable(2);
const Polynomial one(1);

}  // namespace

TEST_CASE("polynomial arithmetic") {
  Polynomial p = (x + one) * (x - one);
  CHECK(p == x * x - one);
  CHECK(p.degree_in(0) == 2);
  CHECK(p.degree_in(1) == 0);
  CHECK((x * y).derivative(0) == y);
  CHECK((x * x * y).derivative(0) == Polynomial(2) * x * y);
  CHECK((x + y).pow(2) == x * x + Polynomial(2) * x * y + y * y);
  CHECK(Polynomial(0).is_zero());
}

TEST_CASE("exact division") {
  auto q = Polynomial::divide_exact(x * x * y - y, x - one);
  REQUIRE(q);
  CHECK(*q == x * y + y);
  CHECK_FALSE(Polynomial::divide_exact(x * x + one, x + one));
}

TEST_CASE("gcd of multivariate polynomials") {
  Polynomial common = x * y + z + one;
  Polynomial a = common * (x - y);
  Polynomial b = common * (x + Polynomial(2) * z);
  CHECK(gcd(a, b) == common.monic());
  CHECK(gcd(x * x - one, x - one) == x - one);
  CHECK(gcd(x, y).is_constant());
  CHECK(gcd(Polynomial(), x + one) == x + one);
}

TEST_CASE("gcd property: divides both inputs and recovers planted factors") {
  testing::Generator gen(7);
  for (int trial = 0; trial < 40; ++trial) {
    Polynomial c = gen.nonzero_polynomial(3, 2);
    Polynomial a = c * gen.nonzero_polynomial(3, 2);
    Polynomial b = c * gen.nonzero_polynomial(3, 2);
    Polynomial g = gcd(a, b);
    CHECK(Polynomial::divide_exact(a, g));
    CHECK(Polynomial::divide_exact(b, g));
    CHECK(Polynomial::divide_exact(g, c.monic()));
  }
}

TEST_CASE("rational functions reduce to canonical form") {
  auto r = RationalFunction::fraction(x * x - one, x - one);
  CHECK(r == RationalFunction(x + one));
  CHECK(r.is_polynomial());

  auto s = RationalFunction::fraction(Polynomial(2) * x, Polynomial(4) * x * y);
  CHECK(s.numerator() == Polynomial(mpq_class(1, 2)));
  CHECK(s.denominator() == y);

  auto a = RationalFunction::fraction(one, x);
  auto b = RationalFunction::fraction(one, y);
  CHECK(a + b == RationalFunction::fraction(x + y, x * y));
  CHECK((a - a).is_zero());
  CHECK(a * RationalFunction(x) == RationalFunction(1));
}

TEST_CASE("rational derivative and composition") {
  auto inv = RationalFunction::fraction(one, x + one);
  CHECK(inv.derivative(0) == RationalFunction::fraction(Polynomial(-1), (x + one) * (x + one)));
  std::vector<RationalFunction> subs{RationalFunction(y * y), RationalFunction(x)};
  CHECK(inv.compose(subs) == RationalFunction::fraction(one, y * y + one));
}

TEST_CASE("field laws hold on random rational functions") {
  testing::Generator gen(11);
  for (int trial = 0; trial < 25; ++trial) {
    auto a = RationalFunction::fraction(gen.polynomial(2, 2), gen.nonzero_polynomial(2, 2));
    auto b = RationalFunction::fraction(gen.polynomial(2, 2), gen.nonzero_polynomial(2, 2));
    auto c = RationalFunction::fraction(gen.polynomial(2, 2), gen.nonzero_polynomial(2, 2));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a + b) - b == a);
    if (!b.is_zero()) CHECK((a / b) * b == a);
    CHECK((a * b).derivative(0) == a.derivative(0) * b + a * b.derivative(0));
  }
}
