#include "superproj/super_function.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace superproj {

std::string Dimension::coordinate_name(unsigned i) const {
  if (i >= size()) throw Error(ErrorKind::UnknownCoordinate, "coordinate index " + std::to_string(i));
  return i < n ? "x" + std::to_string(i + 1) : "th" + std::to_string(i - n + 1);
}

std::vector<std::string> Dimension::even_names() const {
  std::vector<std::string> names;
  for (unsigned i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

int odd_product_sign(SuperFunction::Mask a, SuperFunction::Mask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (SuperFunction::Mask rest = b; rest != 0; rest &= rest - 1) {
    int j = std::countr_zero(rest);
    swaps += std::popcount(static_cast<SuperFunction::Mask>(a >> (j + 1)));
  }
  return (swaps & 1) ? -1 : 1;
}

SuperFunction::SuperFunction(Dimension dim, RationalFunction even) : dim_(dim) {
  if (!even.is_zero()) terms_.emplace(0, std::move(even));
}

SuperFunction SuperFunction::coordinate(Dimension dim, unsigned i) {
  if (i >= dim.size()) throw Error(ErrorKind::UnknownCoordinate, "coordinate index " + std::to_string(i));
  if (i < dim.n) return SuperFunction(dim, RationalFunction::variable(i));
  return odd_monomial(dim, Mask{1} << (i - dim.n), RationalFunction(1));
}

SuperFunction SuperFunction::odd_monomial(Dimension dim, Mask mask, RationalFunction coeff) {
  if (mask >> dim.m) throw Error(ErrorKind::UnknownCoordinate, "odd monomial outside dimension " + dim.to_string());
  SuperFunction f(dim);
  if (!coeff.is_zero()) f.terms_.emplace(mask, std::move(coeff));
  return f;
}

std::optional<Parity> SuperFunction::parity() const {
  std::optional<Parity> p;
  for (const auto& [mask, c] : terms_) {
    Parity q = parity_of(std::popcount(mask));
    if (p && *p != q) return std::nullopt;
    p = q;
  }
  return p ? p : std::optional<Parity>(Parity::even);
}

Parity SuperFunction::homogeneous_parity() const {
  auto p = parity();
  if (!p) throw Error(ErrorKind::NonHomogeneous, "element " + to_string() + " has no definite parity");
  return *p;
}

bool SuperFunction::has_parity(Parity p) const {
  for (const auto& [mask, c] : terms_)
    if (parity_of(std::popcount(mask)) != p) return false;
  return true;
}

RationalFunction SuperFunction::body() const {
  auto it = terms_.find(0);
  return it == terms_.end() ? RationalFunction() : it->second;
}

bool SuperFunction::is_even_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.is_constant());
}

void SuperFunction::add_term(Mask mask, const RationalFunction& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(mask, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void SuperFunction::check_same_dimension(const SuperFunction& o) const {
  if (!(dim_ == o.dim_))
    throw Error(ErrorKind::DimensionMismatch, "operands over " + dim_.to_string() + " and " + o.dim_.to_string());
}

SuperFunction& SuperFunction::operator+=(const SuperFunction& o) {
  check_same_dimension(o);
  for (const auto& [mask, c] : o.terms_) add_term(mask, c);
  return *this;
}

SuperFunction& SuperFunction::operator-=(const SuperFunction& o) {
  check_same_dimension(o);
  for (const auto& [mask, c] : o.terms_) add_term(mask, -c);
  return *this;
}

SuperFunction& SuperFunction::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [mask, v] : terms_) v = v * c;
  return *this;
}

SuperFunction operator*(const SuperFunction& a, const SuperFunction& b) {
  a.check_same_dimension(b);
  SuperFunction r(a.dim_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      int s = odd_product_sign(ma, mb);
      if (s == 0) continue;
      RationalFunction c = ca * cb;
      r.add_term(ma | mb, s > 0 ? c : -c);
    }
  }
  return r;
}

SuperFunction SuperFunction::operator-() const {
  SuperFunction r = *this;
  for (auto& [mask, c] : r.terms_) c = -c;
  return r;
}

SuperFunction SuperFunction::partial(unsigned i) const {
  if (i >= dim_.size()) throw Error(ErrorKind::UnknownCoordinate, "derivative index " + std::to_string(i));
  SuperFunction r(dim_);
  if (i < dim_.n) {
    for (const auto& [mask, c] : terms_) r.add_term(mask, c.derivative(i));
    return r;
  }
  const unsigned k = i - dim_.n;
  const Mask b = Mask{1} << k;
  for (const auto& [mask, c] : terms_) {
    if (!(mask & b)) continue;
    int before = std::popcount(static_cast<Mask>(mask & (b - 1)));
    r.add_term(mask & ~b, (before & 1) ? -c : c);
  }
  return r;
}

SuperFunction SuperFunction::inverse() const {
  if (parity() != Parity::even) throw Error(ErrorKind::NotInvertible, "inverse of a non-even element");
  RationalFunction b = body();
  if (b.is_zero()) throw Error(ErrorKind::NotInvertible, "element with zero body: " + to_string());
  SuperFunction b_inv(dim_, b.inverse());
  SuperFunction nil = *this - SuperFunction(dim_, b);
  SuperFunction step = -(nil * b_inv);
  SuperFunction sum(dim_, 1);
  SuperFunction power(dim_, 1);
  for (unsigned k = 0; k <= dim_.m; ++k) {
    power = power * step;
    if (power.is_zero()) break;
    sum += power;
  }
  return b_inv * sum;
}

namespace {

SuperFunction taylor_compose(const RationalFunction& c, unsigned var, const Dimension& source,
                             std::span<const RationalFunction> bodies, std::span<const SuperFunction> nils,
                             const Dimension& target) {
  if (var == source.n) return SuperFunction(target, c.compose(bodies));
  SuperFunction result(target);
  RationalFunction deriv = c;
  SuperFunction nil_power(target, 1);
  mpq_class factorial = 1;
  for (unsigned r = 0;; ++r) {
    result += taylor_compose(deriv, var + 1, source, bodies, nils, target) * nil_power * mpq_class(1 / factorial);
    nil_power = nil_power * nils[var];
    if (nil_power.is_zero()) break;
    deriv = deriv.derivative(var);
    if (deriv.is_zero()) break;
    factorial *= r + 1;
  }
  return result;
}

}  // namespace

SuperFunction SuperFunction::compose(std::span<const SuperFunction> subs) const {
  if (subs.size() != dim_.size())
    throw Error(ErrorKind::DimensionMismatch, "composition needs " + std::to_string(dim_.size()) + " substitutes");
  if (subs.empty()) return *this;
  const Dimension target = subs.front().dimension();
  std::vector<RationalFunction> bodies;
  std::vector<SuperFunction> nils;
  for (unsigned a = 0; a < dim_.size(); ++a) {
    if (!(subs[a].dimension() == target)) throw Error(ErrorKind::DimensionMismatch, "substitutes over mixed dimensions");
    if (!subs[a].has_parity(dim_.parity(a)))
      throw Error(ErrorKind::NonHomogeneous, "substitute for " + dim_.coordinate_name(a) + " has the wrong parity");
    if (a < dim_.n) {
      bodies.push_back(subs[a].body());
      nils.push_back(subs[a] - SuperFunction(target, subs[a].body()));
    }
  }
  SuperFunction result(target);
  for (const auto& [mask, c] : terms_) {
    SuperFunction term = taylor_compose(c, 0, dim_, bodies, nils, target);
    for (Mask rest = mask; rest != 0; rest &= rest - 1) term = term * subs[dim_.n + std::countr_zero(rest)];
    result += term;
  }
  return result;
}

std::string SuperFunction::to_string() const {
  if (terms_.empty()) return "0";
  const auto names = dim_.even_names();
  std::vector<Mask> order;
  for (const auto& [mask, c] : terms_) order.push_back(mask);
  std::stable_sort(order.begin(), order.end(), [](Mask a, Mask b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });

  std::vector<std::string> pieces;
  for (Mask mask : order) {
    const RationalFunction& c = terms_.at(mask);
    std::string odd;
    for (Mask rest = mask; rest != 0; rest &= rest - 1) {
      if (!odd.empty()) odd += "*";
      odd += "th" + std::to_string(std::countr_zero(rest) + 1);
    }
    if (!c.is_polynomial()) {
      pieces.push_back(c.to_string(names) + (odd.empty() ? "" : "*" + odd));
      continue;
    }
    for (auto it = c.numerator().terms().rbegin(); it != c.numerator().terms().rend(); ++it) {
      std::string mono = Polynomial::monomial(it->first, abs(it->second)).to_string(names);
      std::string sign = it->second < 0 ? "-" : "";
      if (odd.empty()) {
        pieces.push_back(sign + mono);
      } else if (mono == "1") {
        pieces.push_back(sign + odd);
      } else {
        pieces.push_back(sign + mono + "*" + odd);
      }
    }
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string& p = pieces[i];
    if (i == 0) {
      out << p;
    } else if (!p.empty() && p[0] == '-') {
      out << " - " << p.substr(1);
    } else {
      out << " + " << p;
    }
  }
  return out.str();
}

}  // namespace superproj
