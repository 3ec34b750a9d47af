#include "superproj/rational_function.hpp"

#include "superproj/errors.hpp"

#include <stdexcept>

namespace superproj {

RationalFunction RationalFunction::fraction(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw Error(ErrorKind::NotInvertible, "rational function with zero denominator");
  RationalFunction r(std::move(num), std::move(den), true);
  r.reduce();
  return r;
}

void RationalFunction::reduce() {
  if (num_.is_zero()) {
    den_ = Polynomial(1);
    return;
  }
  if (den_.is_constant()) {
    num_ *= mpq_class(1 / den_.constant_term());
    den_ = Polynomial(1);
    return;
  }
  Polynomial g = gcd(num_, den_);
  if (!g.is_constant()) {
    num_ = *Polynomial::divide_exact(num_, g);
    den_ = *Polynomial::divide_exact(den_, g);
  }
  mpq_class lc = den_.leading_coefficient();
  if (lc != 1) {
    mpq_class inv = 1 / lc;
    num_ *= inv;
    den_ *= inv;
  }
  if (den_.is_constant()) den_ = Polynomial(1);
}

RationalFunction RationalFunction::derivative(std::size_t var) const {
  if (is_polynomial()) return RationalFunction(num_.derivative(var));
  Polynomial n = num_.derivative(var) * den_ - num_ * den_.derivative(var);
  return fraction(std::move(n), den_ * den_);
}

RationalFunction RationalFunction::inverse() const {
  if (is_zero()) throw Error(ErrorKind::NotInvertible, "inverse of zero");
  return fraction(den_, num_);
}

RationalFunction RationalFunction::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  return RationalFunction(num_.pow(static_cast<unsigned>(k)), den_.pow(static_cast<unsigned>(k)), true);
}

RationalFunction RationalFunction::compose(std::span<const RationalFunction> subs) const {
  auto eval = [&](const Polynomial& p) {
    RationalFunction acc;
    std::vector<std::vector<RationalFunction>> powers(subs.size());
    for (const auto& [e, c] : p.terms()) {
      RationalFunction term(c);
      for (std::size_t v = 0; v < e.size(); ++v) {
        if (e[v] == 0) continue;
        if (v >= subs.size()) throw std::out_of_range("compose: missing substitution");
        auto& cache = powers[v];
        if (cache.empty()) cache.push_back(RationalFunction(1));
        while (cache.size() <= e[v]) cache.push_back(cache.back() * subs[v]);
        term *= cache[e[v]];
      }
      acc += term;
    }
    return acc;
  };
  RationalFunction n = eval(num_);
  if (is_polynomial()) return n;
  return n / eval(den_);
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_ == o.den_) {
    num_ += o.num_;
    if (!den_.is_constant()) reduce();
    else if (num_.is_zero()) den_ = Polynomial(1);
    return *this;
  }
  num_ = num_ * o.den_ + o.num_ * den_;
  den_ = den_ * o.den_;
  reduce();
  return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& o) { return *this += -o; }

RationalFunction& RationalFunction::operator*=(const RationalFunction& o) {
  if (is_zero() || o.is_zero()) return *this = RationalFunction();
  num_ = num_ * o.num_;
  if (o.is_polynomial() && is_polynomial()) return *this;
  den_ = den_ * o.den_;
  reduce();
  return *this;
}

RationalFunction& RationalFunction::operator/=(const RationalFunction& o) { return *this *= o.inverse(); }

RationalFunction operator*(RationalFunction a, const mpq_class& c) {
  if (c == 0) return RationalFunction();
  a.num_ *= c;
  return a;
}

RationalFunction RationalFunction::operator-() const { return RationalFunction(-num_, den_, true); }

std::string RationalFunction::to_string(const std::vector<std::string>& names) const {
  if (is_polynomial()) return num_.to_string(names);
  return "(" + num_.to_string(names) + ")/(" + den_.to_string(names) + ")";
}

}  // namespace superproj
