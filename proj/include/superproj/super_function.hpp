#pragma once

#include "superproj/errors.hpp"
#include "superproj/rational_function.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace superproj {

enum class Parity : std::uint8_t { even = 0, odd = 1 };

constexpr Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
constexpr int bit(Parity p) { return static_cast<int>(p); }
constexpr Parity parity_of(int k) { return (k & 1) ? Parity::odd : Parity::even; }

/// (-1)^(p*q)
constexpr int koszul(Parity p, Parity q) { return (bit(p) & bit(q)) ? -1 : 1; }

/// Coordinate counts of a superdomain: indices 0..n-1 are the even coordinates
/// x1..xn, indices n..n+m-1 the odd coordinates th1..thm.
struct Dimension {
  unsigned n = 0;
  unsigned m = 0;

  unsigned size() const { return n + m; }
  int n0() const { return static_cast<int>(n) - static_cast<int>(m); }
  bool is_odd(unsigned i) const { return i >= n; }
  Parity parity(unsigned i) const { return is_odd(i) ? Parity::odd : Parity::even; }
  std::string coordinate_name(unsigned i) const;
  std::vector<std::string> even_names() const;
  std::string to_string() const { return std::to_string(n) + "|" + std::to_string(m); }

  friend bool operator==(const Dimension&, const Dimension&) = default;
};

/// Element of C(x1..xn)[th1..thm]: a map from odd monomials to rational
/// coefficients. Odd monomials are bit masks over the odd coordinates; the
/// monomial stands for the ascending product th_{i1} th_{i2} ... and its sign
/// is absorbed into the coefficient. The coefficient multiplies from the left.
class SuperFunction {
 public:
  using Mask = std::uint32_t;
  using Terms = std::map<Mask, RationalFunction>;

  SuperFunction() = default;
  explicit SuperFunction(Dimension dim) : dim_(dim) {}
  SuperFunction(Dimension dim, RationalFunction even);
  SuperFunction(Dimension dim, const mpq_class& c) : SuperFunction(dim, RationalFunction(c)) {}
  SuperFunction(Dimension dim, long c) : SuperFunction(dim, mpq_class(c)) {}

  static SuperFunction coordinate(Dimension dim, unsigned i);
  static SuperFunction odd_monomial(Dimension dim, Mask mask, RationalFunction coeff);

  const Dimension& dimension() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Parity of a homogeneous element; nullopt for mixed elements. Zero reports even.
  std::optional<Parity> parity() const;
  Parity homogeneous_parity() const;  // throws NonHomogeneous
  bool has_parity(Parity p) const;    // zero has every parity

  /// Coefficient of the empty odd monomial.
  RationalFunction body() const;
  bool is_even_constant() const;

  /// Left partial derivative with respect to coordinate i.
  SuperFunction partial(unsigned i) const;

  /// Multiplicative inverse of an even element with nonzero body.
  SuperFunction inverse() const;

  /// Substitute subs[a] for coordinate a. The substitutes live in their own
  /// (common) dimension and must have the parity of the coordinate they replace.
  SuperFunction compose(std::span<const SuperFunction> subs) const;

  SuperFunction& operator+=(const SuperFunction& o);
  SuperFunction& operator-=(const SuperFunction& o);
  SuperFunction& operator*=(const mpq_class& c);

  friend SuperFunction operator+(SuperFunction a, const SuperFunction& b) { return a += b; }
  friend SuperFunction operator-(SuperFunction a, const SuperFunction& b) { return a -= b; }
  friend SuperFunction operator*(const SuperFunction& a, const SuperFunction& b);
  friend SuperFunction operator*(SuperFunction a, const mpq_class& c) { return a *= c; }
  friend SuperFunction operator*(const mpq_class& c, SuperFunction a) { return a *= c; }
  SuperFunction operator-() const;

  friend bool operator==(const SuperFunction& a, const SuperFunction& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  /// Canonical rendering in the expression grammar.
  std::string to_string() const;

 private:
  void add_term(Mask mask, const RationalFunction& c);
  void check_same_dimension(const SuperFunction& o) const;

  Dimension dim_;
  Terms terms_;
};

/// Supercommutative product, same as operator*.
inline SuperFunction gmul(const SuperFunction& a, const SuperFunction& b) { return a * b; }
inline SuperFunction partial(unsigned i, const SuperFunction& a) { return a.partial(i); }
inline SuperFunction normal_form(const SuperFunction& a) { return a; }
inline bool is_zero(const SuperFunction& a) { return a.is_zero(); }

/// Sign of reordering th^I th^J into ascending order; 0 when I and J overlap.
int odd_product_sign(SuperFunction::Mask a, SuperFunction::Mask b);

}  // namespace superproj
