#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace superproj {

/// Sparse multivariate polynomial over Q in the variables v0, v1, ...
///
/// Exponent vectors are stored with trailing zeros trimmed, so polynomials in
/// different numbers of variables combine freely. Terms are kept in a std::map
/// ordered lexicographically on exponent vectors; the last entry is the
/// leading term.
/// Exact p/q in canonical form (q may be negative).
inline mpq_class ratio(long p, long q) {
  mpq_class r(p, q);
  r.canonicalize();
  return r;
}

class Polynomial {
 public:
  using Exponents = std::vector<std::uint16_t>;
  using Terms = std::map<Exponents, mpq_class>;

  Polynomial() = default;
  explicit Polynomial(const mpq_class& constant);
  explicit Polynomial(long constant) : Polynomial(mpq_class(constant)) {}

  static Polynomial variable(std::size_t var);
  static Polynomial monomial(Exponents exps, const mpq_class& coeff);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  mpq_class constant_term() const;

  /// One more than the largest variable index that occurs (0 for constants).
  std::size_t num_vars() const;
  unsigned degree_in(std::size_t var) const;
  unsigned total_degree() const;

  /// Coefficient of var^d, as a polynomial in which var does not occur.
  Polynomial coefficient_in(std::size_t var, unsigned d) const;
  Polynomial leading_coefficient_in(std::size_t var) const;
  const mpq_class& leading_coefficient() const;

  Polynomial derivative(std::size_t var) const;
  Polynomial pow(unsigned k) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const mpq_class& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const mpq_class& c) { return a *= c; }
  friend Polynomial operator*(const mpq_class& c, Polynomial a) { return a *= c; }
  Polynomial operator-() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Polynomial& a, const Polynomial& b) { return a.terms_ < b.terms_; }

  /// Quotient when b divides a exactly, otherwise nullopt.
  static std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b);

  /// Scaled so that the leading coefficient is 1 (zero stays zero).
  Polynomial monic() const;

  /// Names variable i as names[i]; unnamed variables print as v<i>.
  std::string to_string(const std::vector<std::string>& names) const;

 private:
  void add_term(const Exponents& e, const mpq_class& c);
  Terms terms_;
};

/// Monic greatest common divisor over Q (recursive primitive PRS).
Polynomial gcd(const Polynomial& a, const Polynomial& b);

/// Content of a with respect to var: gcd of its coefficients in var.
Polynomial content_in(const Polynomial& a, std::size_t var);

/// Pseudo-remainder of a by b as univariate polynomials in var.
Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, std::size_t var);

}  // namespace superproj
