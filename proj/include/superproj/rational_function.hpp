#pragma once

#include "superproj/polynomial.hpp"

#include <span>
#include <string>
#include <vector>

namespace superproj {

/// Reduced quotient of polynomials over Q.
///
/// Canonical form: gcd(numerator, denominator) = 1 and the denominator is
/// monic, so structural equality decides equality of rational functions.
class RationalFunction {
 public:
  RationalFunction() : den_(1) {}
  explicit RationalFunction(Polynomial p) : num_(std::move(p)), den_(1) {}
  explicit RationalFunction(const mpq_class& c) : num_(c), den_(1) {}
  explicit RationalFunction(long c) : RationalFunction(mpq_class(c)) {}

  static RationalFunction fraction(Polynomial num, Polynomial den);
  static RationalFunction variable(std::size_t var) { return RationalFunction(Polynomial::variable(var)); }

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  mpq_class constant_value() const { return num_.constant_term(); }

  RationalFunction derivative(std::size_t var) const;
  RationalFunction inverse() const;
  RationalFunction pow(int k) const;

  /// Substitutes subs[i] for variable i.
  RationalFunction compose(std::span<const RationalFunction> subs) const;

  RationalFunction& operator+=(const RationalFunction& o);
  RationalFunction& operator-=(const RationalFunction& o);
  RationalFunction& operator*=(const RationalFunction& o);
  RationalFunction& operator/=(const RationalFunction& o);

  friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
  friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
  friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
  friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }
  friend RationalFunction operator*(RationalFunction a, const mpq_class& c);
  RationalFunction operator-() const;

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  RationalFunction(Polynomial num, Polynomial den, bool) : num_(std::move(num)), den_(std::move(den)) {}
  void reduce();

  Polynomial num_;
  Polynomial den_;
};

}  // namespace superproj
