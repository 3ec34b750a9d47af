#include "superproj/geometry.hpp"

#include <algorithm>

namespace superproj {

namespace {

SuperFunction signed_by(const SuperFunction& f, int sign) { return sign < 0 ? -f : f; }

std::string index_label(const IndexParities& parities, const Dimension& fdim, unsigned i) {
  if (parities == coordinate_parities(fdim)) return fdim.coordinate_name(i);
  return "index " + std::to_string(i);
}

}  // namespace

void require_regular_dimension(int n0, std::initializer_list<int> excluded, const char* operation) {
  if (std::find(excluded.begin(), excluded.end(), n0) != excluded.end())
    throw Error(ErrorKind::SingularDimension,
                std::string(operation) + " is undefined when n - m = " + std::to_string(n0));
}

// ---- coordinate changes -------------------------------------------------

CoordinateChange::CoordinateChange(Dimension dim, std::vector<SuperFunction> forward,
                                   std::optional<std::vector<SuperFunction>> inverse)
    : dim_(dim), forward_(std::move(forward)), inverse_(std::move(inverse)) {
  auto check_components = [&](const std::vector<SuperFunction>& comps, const char* which) {
    if (comps.size() != dim.size())
      throw Error(ErrorKind::ValidationError, std::string(which) + " map needs " + std::to_string(dim.size()) +
                                                  " components, got " + std::to_string(comps.size()));
    for (unsigned a = 0; a < dim.size(); ++a) {
      if (!(comps[a].dimension() == dim))
        throw Error(ErrorKind::DimensionMismatch, std::string(which) + " component " + dim.coordinate_name(a));
      if (!comps[a].has_parity(dim.parity(a)))
        throw Error(ErrorKind::ValidationError,
                    std::string(which) + " component " + dim.coordinate_name(a) + " has the wrong parity");
    }
  };
  check_components(forward_, "forward");
  if (!inverse_) return;
  check_components(*inverse_, "inverse");
  for (unsigned a = 0; a < dim.size(); ++a) {
    const SuperFunction id = SuperFunction::coordinate(dim, a);
    if (!((*inverse_)[a].compose(forward_) == id) || !(forward_[a].compose(*inverse_) == id))
      throw Error(ErrorKind::ValidationError,
                  "inverse does not invert the forward map in component " + dim.coordinate_name(a));
  }
}

CoordinateChange CoordinateChange::identity(Dimension dim) {
  std::vector<SuperFunction> id;
  for (unsigned a = 0; a < dim.size(); ++a) id.push_back(SuperFunction::coordinate(dim, a));
  return CoordinateChange(dim, id, id);
}

CoordinateChange CoordinateChange::inverted() const {
  if (!inverse_) throw Error(ErrorKind::NotInvertible, "coordinate change has no explicit inverse");
  return CoordinateChange(dim_, *inverse_, forward_);
}

CoordinateChange CoordinateChange::then(const CoordinateChange& next) const {
  if (!(next.dim_ == dim_)) throw Error(ErrorKind::DimensionMismatch, "composing changes of different dimension");
  std::vector<SuperFunction> fwd;
  for (const auto& f : next.forward_) fwd.push_back(f.compose(forward_));
  std::optional<std::vector<SuperFunction>> inv;
  if (inverse_ && next.inverse_) {
    inv.emplace();
    for (const auto& g : *inverse_) inv->push_back(g.compose(*next.inverse_));
  }
  return CoordinateChange(dim_, std::move(fwd), std::move(inv));
}

SuperFunction CoordinateChange::pull_back(const SuperFunction& f_of_new) const { return f_of_new.compose(forward_); }

SuperFunction CoordinateChange::push_forward(const SuperFunction& g_of_old) const {
  if (!inverse_) throw Error(ErrorKind::NotInvertible, "coordinate change has no explicit inverse");
  return g_of_old.compose(*inverse_);
}

SuperMatrix jacobian(const CoordinateChange& c) {
  const Dimension& d = c.dimension();
  SuperMatrix j(coordinate_parities(d), d);
  for (unsigned i = 0; i < d.size(); ++i)
    for (unsigned a = 0; a < d.size(); ++a) j(i, a) = c.forward()[a].partial(i);
  return j;
}

SuperFunction dlog_berezinian(const CoordinateChange& c, unsigned i) {
  const Dimension& d = c.dimension();
  if (i >= d.size()) throw Error(ErrorKind::UnknownCoordinate, "coordinate index " + std::to_string(i));
  const SuperMatrix q = jacobian(c).inverse();
  SuperFunction r(d);
  for (unsigned k = 0; k < d.size(); ++k)
    for (unsigned s = 0; s < d.size(); ++s) {
      SuperFunction second = c.forward()[s].partial(k).partial(i);
      if (second.is_zero()) continue;
      r += signed_by(second * q(s, k), d.is_odd(k) ? -1 : 1);
    }
  return r;
}

// ---- Sym2CovVec / CovectorField -----------------------------------------

Sym2CovVec::Sym2CovVec(IndexParities parities, Dimension function_dim)
    : parities_(std::move(parities)), fdim_(function_dim),
      data_(parities_.size() * parities_.size() * parities_.size(), SuperFunction(function_dim)) {}

void Sym2CovVec::set(unsigned k, unsigned i, unsigned j, const SuperFunction& value) {
  raw(k, i, j) = value;
  if (i != j) raw(k, j, i) = signed_by(value, koszul(parities_[i], parities_[j]));
}

bool Sym2CovVec::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const SuperFunction& f) { return f.is_zero(); });
}

void Sym2CovVec::validate(Parity parity) const {
  for (unsigned k = 0; k < size(); ++k)
    for (unsigned i = 0; i < size(); ++i)
      for (unsigned j = 0; j < size(); ++j) {
        const SuperFunction& v = (*this)(k, i, j);
        auto where = [&] {
          return "(" + index_label(parities_, fdim_, k) + "; " + index_label(parities_, fdim_, i) + ", " +
                 index_label(parities_, fdim_, j) + ")";
        };
        if (!v.has_parity(parities_[k] + parities_[i] + parities_[j] + parity))
          throw Error(ErrorKind::ValidationError, "component " + where() + " has the wrong parity");
        if (!(signed_by(v, koszul(parities_[i], parities_[j])) == (*this)(k, j, i)))
          throw Error(ErrorKind::ValidationError,
                      "component " + where() + " is not graded symmetric in its lower indices");
      }
}

Sym2CovVec& Sym2CovVec::operator+=(const Sym2CovVec& o) {
  if (parities_ != o.parities_) throw Error(ErrorKind::DimensionMismatch, "index ranges differ");
  for (std::size_t t = 0; t < data_.size(); ++t) data_[t] += o.data_[t];
  return *this;
}

Sym2CovVec& Sym2CovVec::operator-=(const Sym2CovVec& o) {
  if (parities_ != o.parities_) throw Error(ErrorKind::DimensionMismatch, "index ranges differ");
  for (std::size_t t = 0; t < data_.size(); ++t) data_[t] -= o.data_[t];
  return *this;
}

Sym2CovVec& Sym2CovVec::operator*=(const mpq_class& c) {
  for (auto& f : data_) f *= c;
  return *this;
}

CovectorField::CovectorField(IndexParities parities, Dimension function_dim, Parity overall)
    : parities_(std::move(parities)), fdim_(function_dim), overall_(overall),
      components_(parities_.size(), SuperFunction(function_dim)) {}

void CovectorField::validate() const {
  for (unsigned i = 0; i < size(); ++i)
    if (!components_[i].has_parity(parities_[i] + overall_))
      throw Error(ErrorKind::ValidationError, "component " + index_label(parities_, fdim_, i) + " has the wrong parity");
}

// ---- div, j, projective classes ----------------------------------------

CovectorField div_trace(const Sym2CovVec& a) {
  CovectorField phi(a.parities(), a.function_dimension());
  for (unsigned i = 0; i < a.size(); ++i) {
    SuperFunction s(a.function_dimension());
    for (unsigned j = 0; j < a.size(); ++j) s += signed_by(a(j, i, j), a.parities()[j] == Parity::odd ? -1 : 1);
    phi[i] = s * mpq_class(2);
  }
  return phi;
}

Sym2CovVec j_inject(const CovectorField& phi) {
  Sym2CovVec a(phi.parities(), phi.function_dimension());
  const mpq_class half(1, 2);
  for (unsigned i = 0; i < a.size(); ++i)
    for (unsigned j = 0; j < a.size(); ++j) {
      // delta^k_j phi_i at k = j, delta^k_i phi_j at k = i
      a.raw(j, i, j) += phi[i] * half;
      a.raw(i, i, j) += signed_by(phi[j], koszul(phi.parities()[i], phi.parities()[j])) * half;
    }
  return a;
}

ProjectiveClass projective_class(const Connection& gamma) {
  const int n0 = gamma.n0();
  require_regular_dimension(n0, {-1}, "the projective class");
  Sym2CovVec correction = j_inject(div_trace(gamma));
  correction *= ratio(1, n0 + 1);
  return gamma - correction;
}

bool projectively_equivalent(const Connection& a, const Connection& b) {
  return projective_class(a) == projective_class(b);
}

// ---- transformations ----------------------------------------------------

namespace {

Sym2CovVec transform_components(const Sym2CovVec* a_new, const CoordinateChange& c, bool with_second_derivatives) {
  const Dimension& d = c.dimension();
  const IndexParities par = coordinate_parities(d);
  const SuperMatrix p = jacobian(c);
  const SuperMatrix q = p.inverse();
  std::vector<SuperFunction> pulled;
  if (a_new) {
    if (a_new->parities() != par) throw Error(ErrorKind::DimensionMismatch, "tensor and change differ in dimension");
    for (unsigned k = 0; k < d.size(); ++k)
      for (unsigned a = 0; a < d.size(); ++a)
        for (unsigned b = 0; b < d.size(); ++b) pulled.push_back(c.pull_back((*a_new)(k, a, b)));
  }
  auto at = [&](unsigned k, unsigned a, unsigned b) -> const SuperFunction& {
    return pulled[(std::size_t{k} * d.size() + a) * d.size() + b];
  };
  Sym2CovVec out(par, d);
  for (unsigned i = 0; i < d.size(); ++i)
    for (unsigned j = 0; j < d.size(); ++j) {
      // y^s = second derivative + (-1)^(i(j+b)) P(j,b) P(i,a) A^s_ab
      std::vector<SuperFunction> y(d.size(), SuperFunction(d));
      for (unsigned s = 0; s < d.size(); ++s) {
        if (with_second_derivatives) y[s] += c.forward()[s].partial(j).partial(i);
        if (!a_new) continue;
        for (unsigned a = 0; a < d.size(); ++a) {
          if (p(i, a).is_zero()) continue;
          for (unsigned b = 0; b < d.size(); ++b) {
            if (p(j, b).is_zero() || at(s, a, b).is_zero()) continue;
            int sign = koszul(par[i], par[j] + par[b]);
            y[s] += signed_by(p(j, b) * p(i, a) * at(s, a, b), sign);
          }
        }
      }
      for (unsigned k = 0; k < d.size(); ++k) {
        SuperFunction v(d);
        for (unsigned s = 0; s < d.size(); ++s)
          if (!y[s].is_zero()) v += y[s] * q(s, k);
        out.raw(k, i, j) = v;
      }
    }
  return out;
}

}  // namespace

Connection pullback_connection(const Connection& gamma_new, const CoordinateChange& c) {
  return transform_components(&gamma_new, c, true);
}

Sym2CovVec pullback_tensor(const Sym2CovVec& a_new, const CoordinateChange& c) {
  return transform_components(&a_new, c, false);
}

Connection transform_connection(const Connection& gamma, const CoordinateChange& c) {
  return pullback_connection(gamma, c.inverted());
}

namespace {

Sym2CovVec schwarzian_impl(const CoordinateChange& c, bool as_printed) {
  const Dimension& d = c.dimension();
  const int n0 = d.n0();
  require_regular_dimension(n0, {-1}, "the super-Schwarzian");
  Sym2CovVec a = transform_components(nullptr, c, true);
  std::vector<SuperFunction> dl;
  for (unsigned i = 0; i < d.size(); ++i) dl.push_back(dlog_berezinian(c, i));
  const mpq_class w = ratio(1, n0 + 1);
  for (unsigned i = 0; i < d.size(); ++i)
    for (unsigned j = 0; j < d.size(); ++j) {
      const int sign = koszul(d.parity(i), d.parity(j));
      a.raw(j, i, j) -= signed_by(dl[i], as_printed ? sign : 1) * w;
      a.raw(i, i, j) -= signed_by(dl[j], as_printed ? 1 : sign) * w;
    }
  return a;
}

}  // namespace

Sym2CovVec super_schwarzian(const CoordinateChange& c) { return schwarzian_impl(c, false); }

Sym2CovVec super_schwarzian_as_printed(const CoordinateChange& c) { return schwarzian_impl(c, true); }

}  // namespace superproj

namespace superproj {

Bivector::Bivector(Dimension dim, Parity parity)
    : dim_(dim), parity_(parity), data_(dim.size() * dim.size(), SuperFunction(dim)) {}

void Bivector::set(unsigned i, unsigned j, const SuperFunction& value) {
  raw(i, j) = value;
  if (i != j) raw(j, i) = koszul(dim_.parity(i), dim_.parity(j)) < 0 ? -value : value;
}

bool Bivector::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const SuperFunction& f) { return f.is_zero(); });
}

void Bivector::validate() const {
  for (unsigned i = 0; i < size(); ++i)
    for (unsigned j = 0; j < size(); ++j) {
      const std::string where = "(" + dim_.coordinate_name(i) + ", " + dim_.coordinate_name(j) + ")";
      if (!(*this)(i, j).has_parity(dim_.parity(i) + dim_.parity(j) + parity_))
        throw Error(ErrorKind::ValidationError, "component " + where + " has the wrong parity");
      const SuperFunction& back = (*this)(j, i);
      const SuperFunction expect = koszul(dim_.parity(i), dim_.parity(j)) < 0 ? -(*this)(i, j) : (*this)(i, j);
      if (!(back == expect)) throw Error(ErrorKind::ValidationError, "component " + where + " is not graded symmetric");
    }
}

Bivector transform_bivector(const Bivector& s, const CoordinateChange& c) {
  const Dimension& d = c.dimension();
  if (!(s.dimension() == d)) throw Error(ErrorKind::DimensionMismatch, "bivector and change differ in dimension");
  const SuperMatrix p = jacobian(c);
  Bivector out(d, s.parity());
  for (unsigned a = 0; a < d.size(); ++a)
    for (unsigned b = 0; b < d.size(); ++b) {
      SuperFunction v(d);
      for (unsigned i = 0; i < d.size(); ++i) {
        if (p(i, a).is_zero()) continue;
        for (unsigned j = 0; j < d.size(); ++j) {
          if (s(i, j).is_zero() || p(j, b).is_zero()) continue;
          SuperFunction t = s(i, j) * p(i, a) * p(j, b);
          v += koszul(d.parity(j), d.parity(i) + d.parity(a)) < 0 ? -t : t;
        }
      }
      out.raw(a, b) = c.push_forward(v);
    }
  return out;
}

}  // namespace superproj
