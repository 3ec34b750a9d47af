#pragma once

#include "superproj/thomas.hpp"

#include <array>
#include <functional>

namespace superproj {

/// Polynomial in the momenta p_a (parity of p_a = parity of x^a) with
/// SuperFunction coefficients. A term c p_0^e0 p_1^e1 ... keeps the momenta in
/// ascending order with the coefficient on the left; odd momenta have exponent
/// at most one.
class PhaseFunction {
 public:
  using Exponents = std::vector<unsigned>;
  using Terms = std::map<Exponents, SuperFunction>;

  PhaseFunction() = default;
  explicit PhaseFunction(Dimension dim) : dim_(dim) {}
  PhaseFunction(const SuperFunction& f);  // NOLINT: functions are phase functions
  static PhaseFunction momentum(Dimension dim, unsigned a);

  const Dimension& dimension() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::optional<Parity> parity() const;
  Parity homogeneous_parity() const;  // throws NonHomogeneous
  /// Largest total momentum degree (0 for zero).
  unsigned momentum_degree() const;
  /// Momentum-free part.
  SuperFunction function_part() const;

  PhaseFunction partial_x(unsigned i) const;
  /// Left derivative with respect to p_a.
  PhaseFunction partial_p(unsigned a) const;

  PhaseFunction& operator+=(const PhaseFunction& o);
  PhaseFunction& operator-=(const PhaseFunction& o);
  PhaseFunction& operator*=(const mpq_class& c);
  friend PhaseFunction operator+(PhaseFunction a, const PhaseFunction& b) { return a += b; }
  friend PhaseFunction operator-(PhaseFunction a, const PhaseFunction& b) { return a -= b; }
  friend PhaseFunction operator*(PhaseFunction a, const mpq_class& c) { return a *= c; }
  friend PhaseFunction operator*(const PhaseFunction& a, const PhaseFunction& b);
  PhaseFunction operator-() const;
  friend bool operator==(const PhaseFunction& a, const PhaseFunction& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  /// Coefficients in the expression grammar, momenta written p_<coordinate>.
  std::string to_string() const;

 private:
  void accumulate(const Exponents& e, const SuperFunction& c);

  Dimension dim_;
  Terms terms_;
};

/// Even Poisson bracket on T*M with (p_a, x^b) = delta_a^b:
/// (F,G) = sum_a (-1)^(a(F+1)) (d_{p_a}F d_a G - (-1)^a d_a F d_{p_a} G).
PhaseFunction canonical_pb(const PhaseFunction& f, const PhaseFunction& g);

/// (1/2) S^ij p_j p_i, normalized so that ((S, x^i), x^j) = S^ij.
PhaseFunction master_hamiltonian(const Bivector& s);
/// gamma^i p_i.
PhaseFunction linear_hamiltonian(const std::vector<SuperFunction>& gamma);

/// {f,g} = ((S,f),g) = S^ab d_b f d_a g (-1)^(a f) for S = master_hamiltonian(S^ab).
/// Requires S of momentum degree at most 2.
SuperFunction hamiltonian_bracket(const PhaseFunction& s, const SuperFunction& f, const SuperFunction& g);

/// [a,b] = (-1)^a {a,b} and its inverse {a,b} = (-1)^a [a,b].
template <class T>
T odd_from_symmetric(const T& a, const T& b, const std::function<T(const T&, const T&)>& symmetric) {
  T v = symmetric(a, b);
  return a.homogeneous_parity() == Parity::odd ? -v : v;
}
template <class T>
T symmetric_from_odd(const T& a, const T& b, const std::function<T(const T&, const T&)>& odd) {
  T v = odd(a, b);
  return a.homogeneous_parity() == Parity::odd ? -v : v;
}

/// [a,[b,c]] - [[a,b],c] - (-1)^((a+1)(b+1)) [b,[a,c]] for an odd bracket.
template <class T>
T jacobiator(const T& a, const T& b, const T& c, const std::function<T(const T&, const T&)>& odd) {
  const Parity pa = a.homogeneous_parity(), pb = b.homogeneous_parity();
  T third = odd(b, odd(a, c));
  if (koszul(pa + Parity::odd, pb + Parity::odd) < 0) third = -third;
  return odd(a, odd(b, c)) - odd(odd(a, b), c) - third;
}

/// (S,S).
PhaseFunction jacobi_obstruction(const PhaseFunction& s);

struct JacobiWitness {
  std::array<SuperFunction, 3> arguments;
  SuperFunction jacobiator;
};

/// Searches coordinates, then monomials of degree at most max_degree, for a
/// triple violating the Jacobi identity of [f,g] = (-1)^f ((S,f),g).
std::optional<JacobiWitness> find_jacobi_witness(const PhaseFunction& s, unsigned max_degree = 2);

struct Residual {
  std::string label;
  std::string expression;
  bool zero = true;
};

/// Named obstruction expressions plus secondary verdicts from independent
/// evaluations. satisfied() is true when every residual vanishes.
struct ConditionReport {
  std::vector<Residual> residuals;
  std::vector<std::pair<std::string, bool>> verdicts;
  std::vector<std::string> notes;

  bool satisfied() const;
  std::optional<bool> verdict(const std::string& name) const;
  void add(std::string label, const SuperFunction& f);
  void add(std::string label, const PhaseFunction& f);
};

/// BV conditions for the projective Laplacian of an odd S:
///   (S,S) = 0,
///   (S^jk d_k d_j + T^j d_j) T^i = 0,
///   S^kl d_l d_k S^ij + T^k d_k S^ij + S^ik d_k T^j (-1)^j + S^jk d_k T^i (-1)^(i(j+1)) = 0,
/// T^i = 2/(n0+3) d_j S^ji - (n0+1)/(n0+3) S^jk Pi^i_kj.
/// Verdicts: "formula" (all residuals vanish), "direct" (Delta^2 annihilates
/// the test family), "ord_le_3", "ord_le_2".
ConditionReport bv_check(const Bivector& s, const ProjectiveClass& pi, unsigned max_degree = 3);

/// Jacobi conditions for an odd weight-0 bracket on densities:
/// (S,S), (S,gamma), (S,theta) + (gamma,gamma), (gamma,theta).
/// Verdict "direct": the Jacobi identity of [a,b] = (-1)^a {a,b} on the
/// generators x^i, |Dx| and monomials of degree at most max_degree.
ConditionReport density_jacobi_check(const BracketTriple& t, unsigned max_degree = 1);

/// Direct Jacobi test of the density bracket, returning a violating triple.
std::optional<std::array<DensityElement, 3>> density_jacobi_witness(const BracketTriple& t, unsigned max_degree = 1);

/// For nondegenerate S: (S,S) = 0, gamma^i + S^ij d_j rho / rho = 0,
/// theta - gamma^k gamma_k = 0 with gamma_k = -d_k rho / rho.
ConditionReport symplectic_canonical_check(const BracketTriple& t, const SuperFunction& rho);

struct ProjectivePoissonResiduals {
  std::vector<SuperFunction> pi_line;
  SuperFunction b_line;
};

/// Conditions on (S, Pi, rho) for the canonical extension of S to be an odd
/// Poisson bracket on densities, with l_j = d_j rho / rho and N = n0 + 1:
///   pi_line^i = d_j S^ji (-1)^(j(S+1)) + S^jk Pi^i_kj + (n0+3)/N S^ij l_j,
///   b_line    = S^jk B_kj - d_k (S^kj l_j) (-1)^(k(S+1)) - (n0+2)/N S^kj l_j l_k,
/// with B taken from the lifted connection.
ProjectivePoissonResiduals projective_poisson_residuals(const Bivector& s, const ProjectiveClass& pi,
                                                        const SuperFunction& rho);

/// Residuals above plus (S,S). Verdicts "extension_jacobi" and
/// "extension_symplectic" come from extend_bracket followed by the density
/// checks.
ConditionReport projective_poisson_check(const Bivector& s, const ProjectiveClass& pi, const SuperFunction& rho);

/// Throws Degenerate unless the body of the component matrix of S is invertible.
void require_nondegenerate(const Bivector& s);

}  // namespace superproj
