#pragma once

#include "superproj/geometry.hpp"

#include <map>
#include <tuple>

namespace superproj {

using Weight = mpq_class;

/// Finite sum of weight slices phi(x)|Dx|^lambda.
class DensityElement {
 public:
  using Slices = std::map<Weight, SuperFunction>;

  explicit DensityElement(Dimension dim) : dim_(dim) {}
  DensityElement(const SuperFunction& f, const Weight& weight = 0);

  /// |Dx|^lambda with unit coefficient.
  static DensityElement volume(Dimension dim, const Weight& weight = 1);

  const Dimension& dimension() const { return dim_; }
  const Slices& slices() const { return slices_; }
  bool is_zero() const { return slices_.empty(); }
  /// Coefficient of |Dx|^lambda (zero when absent).
  SuperFunction coefficient(const Weight& weight) const;

  std::optional<Parity> parity() const;
  Parity homogeneous_parity() const;  // throws NonHomogeneous

  /// Left derivative of every coefficient.
  DensityElement partial(unsigned i) const;
  /// d/dv for v = |Dx|: phi v^a -> a phi v^(a-1).
  DensityElement volume_derivative() const;

  DensityElement& operator+=(const DensityElement& o);
  DensityElement& operator-=(const DensityElement& o);
  DensityElement& operator*=(const mpq_class& c);
  friend DensityElement operator+(DensityElement a, const DensityElement& b) { return a += b; }
  friend DensityElement operator-(DensityElement a, const DensityElement& b) { return a -= b; }
  friend DensityElement operator*(DensityElement a, const mpq_class& c) { return a *= c; }
  friend DensityElement operator*(const DensityElement& a, const DensityElement& b);
  DensityElement operator-() const;
  friend bool operator==(const DensityElement& a, const DensityElement& b) {
    return a.dim_ == b.dim_ && a.slices_ == b.slices_;
  }

  std::string to_string() const;

 private:
  void add(const Weight& w, const SuperFunction& f);

  Dimension dim_;
  Slices slices_;
};

inline DensityElement dmul(const DensityElement& a, const DensityElement& b) { return a * b; }
/// Multiplies each weight-lambda slice by lambda.
DensityElement weight_op(const DensityElement& a);

/// Differential operator on densities in normal order: each term is
/// c |Dx|^s d_{i1} ... d_{ik} w^p with i1 <= ... <= ik (odd indices at most
/// once). Equal operators have equal term maps.
class DensityOperator {
 public:
  struct Key {
    Weight shift;
    std::vector<unsigned> derivatives;
    unsigned weight_power = 0;
    friend bool operator<(const Key& a, const Key& b) {
      return std::tie(a.shift, a.derivatives, a.weight_power) < std::tie(b.shift, b.derivatives, b.weight_power);
    }
    friend bool operator==(const Key& a, const Key& b) {
      return a.shift == b.shift && a.derivatives == b.derivatives && a.weight_power == b.weight_power;
    }
  };
  using Terms = std::map<Key, SuperFunction>;

  explicit DensityOperator(Dimension dim) : dim_(dim) {}

  static DensityOperator multiplication(const DensityElement& a);
  static DensityOperator multiplication(const SuperFunction& f, const Weight& shift = 0);
  static DensityOperator derivative(Dimension dim, unsigned i);
  static DensityOperator weight(Dimension dim, unsigned power = 1);
  static DensityOperator identity(Dimension dim) { return weight(dim, 0); }

  const Dimension& dimension() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds c |Dx|^shift d^derivatives w^power, reordering the derivatives
  /// with Koszul signs (derivatives may be given in any order).
  void add_term(const SuperFunction& c, const Weight& shift, std::vector<unsigned> derivatives,
                unsigned weight_power = 0);

  std::optional<Parity> parity() const;
  Parity homogeneous_parity() const;
  /// Split into even and odd parts.
  std::pair<DensityOperator, DensityOperator> split_by_parity() const;

  DensityElement apply(const DensityElement& a) const;

  DensityOperator& operator+=(const DensityOperator& o);
  DensityOperator& operator-=(const DensityOperator& o);
  DensityOperator& operator*=(const mpq_class& c);
  friend DensityOperator operator+(DensityOperator a, const DensityOperator& b) { return a += b; }
  friend DensityOperator operator-(DensityOperator a, const DensityOperator& b) { return a -= b; }
  friend DensityOperator operator*(DensityOperator a, const mpq_class& c) { return a *= c; }
  /// Composition: (a * b)(phi) = a(b(phi)).
  friend DensityOperator operator*(const DensityOperator& a, const DensityOperator& b);
  friend bool operator==(const DensityOperator& a, const DensityOperator& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  void accumulate(const Key& key, const SuperFunction& c);

  Dimension dim_;
  Terms terms_;
};

inline DensityElement apply_operator(const DensityOperator& d, const DensityElement& a) { return d.apply(a); }
inline DensityOperator compose(const DensityOperator& a, const DensityOperator& b) { return a * b; }

/// [a, b] = ab - (-1)^(ab) ba, extended bilinearly over parity components.
DensityOperator graded_commutator(const DensityOperator& a, const DensityOperator& b);

/// Smallest k such that every (k+1)-fold nested commutator with
/// multiplications by coordinates and |Dx| vanishes. Searches k <= max_order
/// and returns max_order + 1 when none is found.
int op_order(const DensityOperator& d, int max_order = 4);

/// Delta(ab) - (-1)^(a Delta) a Delta(b) - Delta(a) b + (-1)^((a+b) Delta) a b Delta(1).
DensityElement generated_bracket(const DensityOperator& delta, const DensityElement& a, const DensityElement& b);

/// Data (S, gamma, theta) of a bracket of parity eps and weight lambda:
/// {x^i, x^j} = S^ij |Dx|^lambda, {x^i, |Dx|} = gamma^i |Dx|^(lambda+1),
/// {|Dx|, |Dx|} = theta |Dx|^(lambda+2).
struct BracketTriple {
  Bivector s;
  std::vector<SuperFunction> gamma;
  SuperFunction theta;
  Parity eps;
  Weight lambda;

  BracketTriple(Bivector s_, std::vector<SuperFunction> gamma_, SuperFunction theta_, Weight lambda_);
  /// Zero triple of the given parity and weight.
  BracketTriple(Dimension dim, Parity eps_, Weight lambda_);

  const Dimension& dimension() const { return s.dimension(); }
  void validate() const;

  friend bool operator==(const BracketTriple& a, const BracketTriple& b) {
    return a.s == b.s && a.gamma == b.gamma && a.theta == b.theta && a.eps == b.eps && a.lambda == b.lambda;
  }
};

/// The biderivation with the triple's component values, symmetric in the
/// sense {a,b} = (-1)^(ab) {b,a}.
DensityElement bracket_from_triple(const BracketTriple& t, const DensityElement& a, const DensityElement& b);

/// |Dx|^l (S^ij d_j d_i + 2 gamma^i w d_i + theta w^2
///        + (d_j S^ji (-1)^(j(eps+1)) + (l-1) gamma^i) d_i
///        + (d_k gamma^k (-1)^(k(eps+1)) + (l-1) theta) w).
DensityOperator canonical_operator(const BracketTriple& t);

/// Adjoint for the pairing of weights summing to one:
/// f^+ = f, d_i^+ = -d_i, w^+ = 1 - w, (AB)^+ = (-1)^(AB) B^+ A^+.
DensityOperator formal_adjoint(const DensityOperator& d);

/// S^ij d_j d_i + (2/(n0+3) d_j S^ji (-1)^(j(S+1)) - (n0+1)/(n0+3) S^jk Pi^i_kj) d_i
/// acting on functions. Throws SingularDimension for n0 in {-1, -3}.
DensityOperator projective_laplacian(const Bivector& s, const ProjectiveClass& pi);

/// gamma^i = (n0+1)/(n0+3) (d_j S^ji (-1)^(j(S+1)) + S^jk Pi^i_kj).
std::vector<SuperFunction> upper_gamma(const Bivector& s, const ProjectiveClass& pi);

/// d_j S^ji (-1)^(j(p+1)) for a bivector of parity p.
std::vector<SuperFunction> bivector_divergence(const Bivector& s);

/// Density monomials x^e th^I |Dx|^mu with total x-degree <= max_degree, every
/// odd subset, and mu ranging over `weights`.
std::vector<DensityElement> density_test_family(Dimension dim, unsigned max_degree, const std::vector<Weight>& weights);

/// Default test weights {0, 1/2, 1}.
std::vector<Weight> default_test_weights();

}  // namespace superproj
