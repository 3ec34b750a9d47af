#pragma once

#include "superproj/super_function.hpp"

#include <optional>
#include <vector>

namespace superproj {

/// Parities of an index range. Base charts use the coordinate parities of a
/// Dimension; the extended (Thomas) chart prepends one even index.
using IndexParities = std::vector<Parity>;

IndexParities coordinate_parities(const Dimension& dim);

/// n - m of an index range: (#even) - (#odd).
int super_dimension(const IndexParities& parities);

/// Square matrix of SuperFunctions with rows and columns labelled by index
/// parities. An even supermatrix has entry (r, c) of parity p(r) + p(c).
class SuperMatrix {
 public:
  SuperMatrix(IndexParities parities, Dimension function_dim);

  static SuperMatrix identity(IndexParities parities, Dimension function_dim);

  unsigned size() const { return static_cast<unsigned>(parities_.size()); }
  const IndexParities& parities() const { return parities_; }
  const Dimension& function_dimension() const { return fdim_; }

  SuperFunction& operator()(unsigned r, unsigned c) { return entries_[r * size() + c]; }
  const SuperFunction& operator()(unsigned r, unsigned c) const { return entries_[r * size() + c]; }

  bool is_even() const;

  /// Two-sided inverse by Gauss-Jordan elimination with invertible pivots.
  /// Throws NotInvertible when the body of a diagonal block is singular.
  SuperMatrix inverse() const;

  friend SuperMatrix operator*(const SuperMatrix& a, const SuperMatrix& b);
  friend SuperMatrix operator-(const SuperMatrix& a, const SuperMatrix& b);
  friend bool operator==(const SuperMatrix& a, const SuperMatrix& b) {
    return a.parities_ == b.parities_ && a.entries_ == b.entries_;
  }

 private:
  IndexParities parities_;
  Dimension fdim_;
  std::vector<SuperFunction> entries_;
};

/// Ber(M) = det(A - B D^-1 C) / det(D).
SuperFunction berezinian(const SuperMatrix& m);

/// Determinant of a matrix whose entries are all even.
SuperFunction even_determinant(const SuperMatrix& m);

/// x -> xbar(x), optionally with an exact inverse xbar -> x (validated).
class CoordinateChange {
 public:
  /// Throws ValidationError if a component has the wrong parity or if the
  /// inverse does not compose to the identity.
  CoordinateChange(Dimension dim, std::vector<SuperFunction> forward,
                   std::optional<std::vector<SuperFunction>> inverse = std::nullopt);

  static CoordinateChange identity(Dimension dim);

  const Dimension& dimension() const { return dim_; }
  const std::vector<SuperFunction>& forward() const { return forward_; }
  const std::optional<std::vector<SuperFunction>>& inverse() const { return inverse_; }
  bool has_inverse() const { return inverse_.has_value(); }

  /// The change xbar -> x; requires the inverse.
  CoordinateChange inverted() const;

  /// First this change, then `next`.
  CoordinateChange then(const CoordinateChange& next) const;

  /// f(x) for a function f of the new coordinates xbar.
  SuperFunction pull_back(const SuperFunction& f_of_new) const;
  /// g(x(xbar)) for a function g of the old coordinates; requires the inverse.
  SuperFunction push_forward(const SuperFunction& g_of_old) const;

 private:
  Dimension dim_;
  std::vector<SuperFunction> forward_;
  std::optional<std::vector<SuperFunction>> inverse_;
};

/// Entry (i, a) = d_i xbar^a (left derivative). Rows carry the derivative
/// index so that the chain rule is ordinary matrix multiplication.
SuperMatrix jacobian(const CoordinateChange& c);

/// d_i log Ber(jacobian) as the contraction
/// (d_i d_k xbar^s) (dx^k / dxbar^s) (-1)^k.
SuperFunction dlog_berezinian(const CoordinateChange& c, unsigned i);

/// Coefficient array A^k_ij (upper index first) of an element of
/// Sym^2 V* (x) V with function entries. Connections, projective classes and
/// Schwarzians all use this layout.
class Sym2CovVec {
 public:
  Sym2CovVec(IndexParities parities, Dimension function_dim);
  explicit Sym2CovVec(Dimension dim) : Sym2CovVec(coordinate_parities(dim), dim) {}

  unsigned size() const { return static_cast<unsigned>(parities_.size()); }
  const IndexParities& parities() const { return parities_; }
  const Dimension& function_dimension() const { return fdim_; }
  int n0() const { return super_dimension(parities_); }

  const SuperFunction& operator()(unsigned k, unsigned i, unsigned j) const { return data_[index(k, i, j)]; }

  /// Sets A^k_ij and the graded-symmetric partner A^k_ji.
  void set(unsigned k, unsigned i, unsigned j, const SuperFunction& value);
  /// Sets A^k_ij alone; pair with validate() when filling raw data.
  SuperFunction& raw(unsigned k, unsigned i, unsigned j) { return data_[index(k, i, j)]; }

  bool is_zero() const;

  /// Throws ValidationError naming the first index triple that breaks graded
  /// symmetry or parity homogeneity (overall parity `parity`).
  void validate(Parity parity = Parity::even) const;

  Sym2CovVec& operator+=(const Sym2CovVec& o);
  Sym2CovVec& operator-=(const Sym2CovVec& o);
  Sym2CovVec& operator*=(const mpq_class& c);
  friend Sym2CovVec operator+(Sym2CovVec a, const Sym2CovVec& b) { return a += b; }
  friend Sym2CovVec operator-(Sym2CovVec a, const Sym2CovVec& b) { return a -= b; }
  friend bool operator==(const Sym2CovVec& a, const Sym2CovVec& b) {
    return a.parities_ == b.parities_ && a.data_ == b.data_;
  }

  /// Applies f to every component.
  template <class F>
  Sym2CovVec map(F&& f) const {
    Sym2CovVec r(parities_, fdim_);
    for (std::size_t t = 0; t < data_.size(); ++t) r.data_[t] = f(data_[t]);
    return r;
  }

 private:
  std::size_t index(unsigned k, unsigned i, unsigned j) const { return (std::size_t{k} * size() + i) * size() + j; }

  IndexParities parities_;
  Dimension fdim_;
  std::vector<SuperFunction> data_;
};

using Connection = Sym2CovVec;
using ProjectiveClass = Sym2CovVec;

/// Components phi_i with parity p(i) + overall parity.
class CovectorField {
 public:
  CovectorField(IndexParities parities, Dimension function_dim, Parity overall = Parity::even);
  explicit CovectorField(Dimension dim, Parity overall = Parity::even)
      : CovectorField(coordinate_parities(dim), dim, overall) {}

  unsigned size() const { return static_cast<unsigned>(components_.size()); }
  const IndexParities& parities() const { return parities_; }
  const Dimension& function_dimension() const { return fdim_; }
  Parity overall_parity() const { return overall_; }

  SuperFunction& operator[](unsigned i) { return components_[i]; }
  const SuperFunction& operator[](unsigned i) const { return components_[i]; }

  void validate() const;

  friend bool operator==(const CovectorField& a, const CovectorField& b) {
    return a.parities_ == b.parities_ && a.components_ == b.components_;
  }

 private:
  IndexParities parities_;
  Dimension fdim_;
  Parity overall_;
  std::vector<SuperFunction> components_;
};

/// (div A)_i = 2 A^j_ij (-1)^j.
CovectorField div_trace(const Sym2CovVec& a);

/// j(phi)^k_ij = (phi_i delta^k_j + (-1)^(ij) phi_j delta^k_i) / 2, so that
/// div(j(phi)) = (n - m + 1) phi.
Sym2CovVec j_inject(const CovectorField& phi);

/// Trace-free part Gamma - j(div Gamma)/(n - m + 1). Throws SingularDimension
/// when n - m = -1.
ProjectiveClass projective_class(const Connection& gamma);

bool projectively_equivalent(const Connection& a, const Connection& b);

/// Pulls a connection given in the new coordinates xbar (as functions of
/// xbar) back along c to the old coordinates x.
Connection pullback_connection(const Connection& gamma_new, const CoordinateChange& c);

/// Tensorial part of the same transformation (no second-derivative term).
Sym2CovVec pullback_tensor(const Sym2CovVec& a_new, const CoordinateChange& c);

/// Coefficients of the connection gamma (old coordinates) in the new
/// coordinates, as functions of the new coordinates. Requires the inverse.
Connection transform_connection(const Connection& gamma, const CoordinateChange& c);

/// Super-Schwarzian of the map x -> xbar, the trace-free part of
/// (d_i d_j xbar^s)(dx^k/dxbar^s). Throws SingularDimension for n - m = -1.
Sym2CovVec super_schwarzian(const CoordinateChange& c);

/// The same expression with the Koszul sign placed on the second delta term,
/// exactly as the formula is commonly printed. Not trace-free when both lower
/// indices are odd; kept for comparison.
Sym2CovVec super_schwarzian_as_printed(const CoordinateChange& c);

/// Contravariant symmetric tensor S^ij of overall parity p, graded symmetric:
/// S^ij = (-1)^(ij) S^ji, with S^ij of parity p(i) + p(j) + p.
class Bivector {
 public:
  explicit Bivector(Dimension dim, Parity parity = Parity::even);

  const Dimension& dimension() const { return dim_; }
  Parity parity() const { return parity_; }
  unsigned size() const { return dim_.size(); }

  const SuperFunction& operator()(unsigned i, unsigned j) const { return data_[i * size() + j]; }
  /// Sets S^ij and the partner S^ji.
  void set(unsigned i, unsigned j, const SuperFunction& value);
  SuperFunction& raw(unsigned i, unsigned j) { return data_[i * size() + j]; }

  bool is_zero() const;
  void validate() const;

  friend bool operator==(const Bivector& a, const Bivector& b) {
    return a.dim_ == b.dim_ && a.parity_ == b.parity_ && a.data_ == b.data_;
  }

 private:
  Dimension dim_;
  Parity parity_;
  std::vector<SuperFunction> data_;
};

/// Components of S in the new coordinates, as functions of the new
/// coordinates: Sbar^ab = S^ij (-1)^(j(i+a)) d_i xbar^a d_j xbar^b.
/// Requires the inverse.
Bivector transform_bivector(const Bivector& s, const CoordinateChange& c);

/// Throws SingularDimension unless value differs from every excluded entry.
void require_regular_dimension(int n0, std::initializer_list<int> excluded, const char* operation);

}  // namespace superproj
