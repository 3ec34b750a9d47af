#include "superproj/densities.hpp"

#include <bit>
#include <set>

namespace superproj {

namespace {

SuperFunction parity_part(const SuperFunction& f, Parity p) {
  SuperFunction out(f.dimension());
  for (const auto& [mask, c] : f.terms())
    if (parity_of(std::popcount(mask)) == p) out += SuperFunction::odd_monomial(f.dimension(), mask, c);
  return out;
}

SuperFunction signed_by(const SuperFunction& f, int sign) { return sign < 0 ? -f : f; }

mpq_class power(const mpq_class& base, unsigned e) {
  mpq_class r = 1;
  for (unsigned k = 0; k < e; ++k) r *= base;
  return r;
}

std::string weight_text(const Weight& w) { return w.get_str(); }

}  // namespace

// ---- DensityElement -----------------------------------------------------

DensityElement::DensityElement(const SuperFunction& f, const Weight& weight) : dim_(f.dimension()) { add(weight, f); }

DensityElement DensityElement::volume(Dimension dim, const Weight& weight) {
  return DensityElement(SuperFunction(dim, 1), weight);
}

void DensityElement::add(const Weight& w, const SuperFunction& f) {
  if (f.is_zero()) return;
  if (!(f.dimension() == dim_)) throw Error(ErrorKind::DimensionMismatch, "density coefficient dimension");
  auto [it, inserted] = slices_.emplace(w, f);
  if (inserted) return;
  it->second += f;
  if (it->second.is_zero()) slices_.erase(it);
}

SuperFunction DensityElement::coefficient(const Weight& weight) const {
  auto it = slices_.find(weight);
  return it == slices_.end() ? SuperFunction(dim_) : it->second;
}

std::optional<Parity> DensityElement::parity() const {
  std::optional<Parity> p;
  for (const auto& [w, f] : slices_) {
    auto q = f.parity();
    if (!q) return std::nullopt;
    if (p && *p != *q) return std::nullopt;
    p = q;
  }
  return p ? p : std::optional<Parity>(Parity::even);
}

Parity DensityElement::homogeneous_parity() const {
  auto p = parity();
  if (!p) throw Error(ErrorKind::NonHomogeneous, "density " + to_string() + " has no definite parity");
  return *p;
}

DensityElement DensityElement::partial(unsigned i) const {
  DensityElement r(dim_);
  for (const auto& [w, f] : slices_) r.add(w, f.partial(i));
  return r;
}

DensityElement DensityElement::volume_derivative() const {
  DensityElement r(dim_);
  for (const auto& [w, f] : slices_)
    if (w != 0) r.add(w - 1, f * w);
  return r;
}

DensityElement& DensityElement::operator+=(const DensityElement& o) {
  if (!(o.dim_ == dim_)) throw Error(ErrorKind::DimensionMismatch, "densities over different charts");
  for (const auto& [w, f] : o.slices_) add(w, f);
  return *this;
}

DensityElement& DensityElement::operator-=(const DensityElement& o) {
  if (!(o.dim_ == dim_)) throw Error(ErrorKind::DimensionMismatch, "densities over different charts");
  for (const auto& [w, f] : o.slices_) add(w, -f);
  return *this;
}

DensityElement& DensityElement::operator*=(const mpq_class& c) {
  if (c == 0) {
    slices_.clear();
    return *this;
  }
  for (auto& [w, f] : slices_) f *= c;
  return *this;
}

DensityElement operator*(const DensityElement& a, const DensityElement& b) {
  if (!(a.dim_ == b.dim_)) throw Error(ErrorKind::DimensionMismatch, "densities over different charts");
  DensityElement r(a.dim_);
  for (const auto& [wa, fa] : a.slices_)
    for (const auto& [wb, fb] : b.slices_) r.add(wa + wb, fa * fb);
  return r;
}

DensityElement DensityElement::operator-() const {
  DensityElement r = *this;
  for (auto& [w, f] : r.slices_) f = -f;
  return r;
}

std::string DensityElement::to_string() const {
  if (slices_.empty()) return "0";
  std::string out;
  for (const auto& [w, f] : slices_) {
    if (!out.empty()) out += " + ";
    if (w == 0)
      out += "(" + f.to_string() + ")";
    else
      out += "(" + f.to_string() + ")*|Dx|^(" + weight_text(w) + ")";
  }
  return out;
}

DensityElement weight_op(const DensityElement& a) {
  DensityElement r(a.dimension());
  for (const auto& [w, f] : a.slices()) r += DensityElement(f * w, w);
  return r;
}

// ---- DensityOperator ----------------------------------------------------

DensityOperator DensityOperator::multiplication(const DensityElement& a) {
  DensityOperator op(a.dimension());
  for (const auto& [w, f] : a.slices()) op.add_term(f, w, {});
  return op;
}

DensityOperator DensityOperator::multiplication(const SuperFunction& f, const Weight& shift) {
  DensityOperator op(f.dimension());
  op.add_term(f, shift, {});
  return op;
}

DensityOperator DensityOperator::derivative(Dimension dim, unsigned i) {
  if (i >= dim.size()) throw Error(ErrorKind::UnknownCoordinate, "coordinate index " + std::to_string(i));
  DensityOperator op(dim);
  op.add_term(SuperFunction(dim, 1), 0, {i});
  return op;
}

DensityOperator DensityOperator::weight(Dimension dim, unsigned power) {
  DensityOperator op(dim);
  op.add_term(SuperFunction(dim, 1), 0, {}, power);
  return op;
}

void DensityOperator::accumulate(const Key& key, const SuperFunction& c) {
  if (c.is_zero()) return;
  if (!(c.dimension() == dim_)) throw Error(ErrorKind::DimensionMismatch, "operator coefficient dimension");
  auto [it, inserted] = terms_.emplace(key, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

void DensityOperator::add_term(const SuperFunction& c, const Weight& shift, std::vector<unsigned> derivatives,
                               unsigned weight_power) {
  int sign = 1;
  for (std::size_t pass = 0; pass < derivatives.size(); ++pass)
    for (std::size_t k = 0; k + 1 < derivatives.size() - pass; ++k) {
      unsigned a = derivatives[k], b = derivatives[k + 1];
      if (a > b) {
        std::swap(derivatives[k], derivatives[k + 1]);
        sign *= koszul(dim_.parity(a), dim_.parity(b));
      }
    }
  for (std::size_t k = 0; k + 1 < derivatives.size(); ++k)
    if (derivatives[k] == derivatives[k + 1] && dim_.is_odd(derivatives[k])) return;
  for (unsigned i : derivatives)
    if (i >= dim_.size()) throw Error(ErrorKind::UnknownCoordinate, "coordinate index " + std::to_string(i));
  accumulate(Key{shift, std::move(derivatives), weight_power}, signed_by(c, sign));
}

std::optional<Parity> DensityOperator::parity() const {
  std::optional<Parity> p;
  for (const auto& [key, c] : terms_) {
    auto q = c.parity();
    if (!q) return std::nullopt;
    Parity t = *q;
    for (unsigned i : key.derivatives) t = t + dim_.parity(i);
    if (p && *p != t) return std::nullopt;
    p = t;
  }
  return p ? p : std::optional<Parity>(Parity::even);
}

Parity DensityOperator::homogeneous_parity() const {
  auto p = parity();
  if (!p) throw Error(ErrorKind::NonHomogeneous, "operator has no definite parity");
  return *p;
}

std::pair<DensityOperator, DensityOperator> DensityOperator::split_by_parity() const {
  DensityOperator even(dim_), odd(dim_);
  for (const auto& [key, c] : terms_) {
    Parity dp = Parity::even;
    for (unsigned i : key.derivatives) dp = dp + dim_.parity(i);
    for (Parity cp : {Parity::even, Parity::odd}) {
      SuperFunction part = parity_part(c, cp);
      (cp + dp == Parity::even ? even : odd).accumulate(key, part);
    }
  }
  return {even, odd};
}

DensityElement DensityOperator::apply(const DensityElement& a) const {
  if (!(a.dimension() == dim_)) throw Error(ErrorKind::DimensionMismatch, "operator and density over different charts");
  DensityElement r(dim_);
  for (const auto& [w, f] : a.slices()) {
    // cache derivatives of f per multi-index
    std::map<std::vector<unsigned>, SuperFunction> cache;
    for (const auto& [key, c] : terms_) {
      auto it = cache.find(key.derivatives);
      if (it == cache.end()) {
        SuperFunction g = f;
        for (auto d = key.derivatives.rbegin(); d != key.derivatives.rend() && !g.is_zero(); ++d) g = g.partial(*d);
        it = cache.emplace(key.derivatives, g).first;
      }
      if (it->second.is_zero()) continue;
      const mpq_class factor = power(w, key.weight_power);
      if (factor == 0) continue;
      r += DensityElement(c * it->second * factor, w + key.shift);
    }
  }
  return r;
}

DensityOperator& DensityOperator::operator+=(const DensityOperator& o) {
  if (!(o.dim_ == dim_)) throw Error(ErrorKind::DimensionMismatch, "operators over different charts");
  for (const auto& [key, c] : o.terms_) accumulate(key, c);
  return *this;
}

DensityOperator& DensityOperator::operator-=(const DensityOperator& o) {
  if (!(o.dim_ == dim_)) throw Error(ErrorKind::DimensionMismatch, "operators over different charts");
  for (const auto& [key, c] : o.terms_) accumulate(key, -c);
  return *this;
}

DensityOperator& DensityOperator::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, f] : terms_) f *= c;
  return *this;
}

namespace {

// w o op, using w o c|Dx|^s = c|Dx|^s (w + s).
DensityOperator weight_left(const DensityOperator& op) {
  DensityOperator r(op.dimension());
  for (const auto& [key, c] : op.terms()) {
    r.add_term(c, key.shift, key.derivatives, key.weight_power + 1);
    if (key.shift != 0) r.add_term(c * key.shift, key.shift, key.derivatives, key.weight_power);
  }
  return r;
}

// d_i o op, using d_i o c = (d_i c) + (-1)^(ic) c d_i.
DensityOperator derivative_left(unsigned i, const DensityOperator& op) {
  const Dimension& d = op.dimension();
  DensityOperator r(d);
  for (const auto& [key, c] : op.terms()) {
    r.add_term(c.partial(i), key.shift, key.derivatives, key.weight_power);
    std::vector<unsigned> derivs = key.derivatives;
    derivs.insert(derivs.begin(), i);
    if (d.is_odd(i)) {
      r.add_term(parity_part(c, Parity::even), key.shift, derivs, key.weight_power);
      r.add_term(-parity_part(c, Parity::odd), key.shift, derivs, key.weight_power);
    } else {
      r.add_term(c, key.shift, derivs, key.weight_power);
    }
  }
  return r;
}

}  // namespace

DensityOperator operator*(const DensityOperator& a, const DensityOperator& b) {
  if (!(a.dim_ == b.dim_)) throw Error(ErrorKind::DimensionMismatch, "operators over different charts");
  DensityOperator result(a.dim_);
  // group the left factor by (derivatives, weight power) so the right factor is
  // pushed through each derivative word once
  std::map<std::pair<std::vector<unsigned>, unsigned>, std::vector<std::pair<Weight, SuperFunction>>> groups;
  for (const auto& [key, c] : a.terms_) groups[{key.derivatives, key.weight_power}].emplace_back(key.shift, c);
  for (const auto& [word, coeffs] : groups) {
    DensityOperator moved = b;
    for (unsigned k = 0; k < word.second; ++k) moved = weight_left(moved);
    for (auto it = word.first.rbegin(); it != word.first.rend(); ++it) moved = derivative_left(*it, moved);
    for (const auto& [shift, c1] : coeffs)
      for (const auto& [key, c2] : moved.terms_) result.accumulate(DensityOperator::Key{shift + key.shift, key.derivatives, key.weight_power}, c1 * c2);
  }
  return result;
}

std::string DensityOperator::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [key, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + c.to_string() + ")";
    if (key.shift != 0) out += "*|Dx|^(" + weight_text(key.shift) + ")";
    for (unsigned i : key.derivatives) out += "*d_" + dim_.coordinate_name(i);
    if (key.weight_power == 1) out += "*w";
    if (key.weight_power > 1) out += "*w^" + std::to_string(key.weight_power);
  }
  return out;
}

DensityOperator graded_commutator(const DensityOperator& a, const DensityOperator& b) {
  auto [ae, ao] = a.split_by_parity();
  auto [be, bo] = b.split_by_parity();
  DensityOperator r(a.dimension());
  const DensityOperator* as[2] = {&ae, &ao};
  const DensityOperator* bs[2] = {&be, &bo};
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      if (as[p]->is_zero() || bs[q]->is_zero()) continue;
      r += (*as[p]) * (*bs[q]);
      DensityOperator back = (*bs[q]) * (*as[p]);
      if (p && q)
        r += back;
      else
        r -= back;
    }
  return r;
}

int op_order(const DensityOperator& d, int max_order) {
  const Dimension& dim = d.dimension();
  std::vector<DensityOperator> gens;
  for (unsigned i = 0; i < dim.size(); ++i) gens.push_back(DensityOperator::multiplication(SuperFunction::coordinate(dim, i)));
  gens.push_back(DensityOperator::multiplication(DensityElement::volume(dim)));
  if (d.is_zero()) return 0;
  // commutators with multiplications supercommute, so nondecreasing
  // generator sequences suffice
  std::vector<std::pair<DensityOperator, std::size_t>> level{{d, 0}};
  for (int k = 0; k <= max_order; ++k) {
    std::vector<std::pair<DensityOperator, std::size_t>> next;
    for (const auto& [op, first] : level)
      for (std::size_t g = first; g < gens.size(); ++g) {
        DensityOperator c = graded_commutator(op, gens[g]);
        if (!c.is_zero()) next.emplace_back(std::move(c), g);
      }
    if (next.empty()) return k;
    level = std::move(next);
  }
  return max_order + 1;
}

DensityElement generated_bracket(const DensityOperator& delta, const DensityElement& a, const DensityElement& b) {
  const Parity pd = delta.homogeneous_parity();
  const Parity pa = a.homogeneous_parity();
  const Parity pb = b.homogeneous_parity();
  const Dimension& dim = delta.dimension();
  DensityElement r = delta.apply(a * b);
  DensityElement t2 = a * delta.apply(b);
  r -= koszul(pa, pd) < 0 ? -t2 : t2;
  r -= delta.apply(a) * b;
  DensityElement t4 = a * b * delta.apply(DensityElement(SuperFunction(dim, 1)));
  r += koszul(pa + pb, pd) < 0 ? -t4 : t4;
  return r;
}

// ---- triples ------------------------------------------------------------

BracketTriple::BracketTriple(Bivector s_, std::vector<SuperFunction> gamma_, SuperFunction theta_, Weight lambda_)
    : s(std::move(s_)), gamma(std::move(gamma_)), theta(std::move(theta_)), eps(s.parity()), lambda(std::move(lambda_)) {}

BracketTriple::BracketTriple(Dimension dim, Parity eps_, Weight lambda_)
    : s(dim, eps_), gamma(dim.size(), SuperFunction(dim)), theta(dim), eps(eps_), lambda(std::move(lambda_)) {}

void BracketTriple::validate() const {
  const Dimension& d = dimension();
  if (s.parity() != eps) throw Error(ErrorKind::WrongParity, "S has a parity different from the triple");
  s.validate();
  if (gamma.size() != d.size())
    throw Error(ErrorKind::ValidationError, "gamma needs " + std::to_string(d.size()) + " components");
  for (unsigned i = 0; i < d.size(); ++i) {
    if (!(gamma[i].dimension() == d)) throw Error(ErrorKind::DimensionMismatch, "gamma component dimension");
    if (!gamma[i].has_parity(d.parity(i) + eps))
      throw Error(ErrorKind::WrongParity, "gamma component " + d.coordinate_name(i) + " has the wrong parity");
  }
  if (!(theta.dimension() == d)) throw Error(ErrorKind::DimensionMismatch, "theta dimension");
  if (!theta.has_parity(eps)) throw Error(ErrorKind::WrongParity, "theta has the wrong parity");
}

DensityElement bracket_from_triple(const BracketTriple& t, const DensityElement& a, const DensityElement& b) {
  const Dimension& d = t.dimension();
  const Parity pa = a.homogeneous_parity();
  b.homogeneous_parity();
  const Weight& l = t.lambda;
  const DensityElement va = a.volume_derivative();
  std::vector<DensityElement> da;
  for (unsigned i = 0; i < d.size(); ++i) da.push_back(a.partial(i));

  DensityElement r(d);
  // {a, x^j} d_j b, with {a, x^j} = (-1)^(aj) (S^ji d_i a + gamma^j v d_v a) v^l
  for (unsigned j = 0; j < d.size(); ++j) {
    DensityElement db = b.partial(j);
    if (db.is_zero()) continue;
    DensityElement ax(d);
    for (unsigned i = 0; i < d.size(); ++i)
      if (!t.s(j, i).is_zero()) ax += DensityElement(t.s(j, i), l) * da[i];
    if (!t.gamma[j].is_zero()) ax += DensityElement(t.gamma[j], l + 1) * va;
    if (koszul(pa, d.parity(j)) < 0) ax = -ax;
    r += ax * db;
  }
  // {a, v} d_v b, with {a, v} = gamma^i v^(l+1) d_i a + theta v^(l+2) d_v a
  DensityElement vb = b.volume_derivative();
  if (!vb.is_zero()) {
    DensityElement av(d);
    for (unsigned i = 0; i < d.size(); ++i)
      if (!t.gamma[i].is_zero()) av += DensityElement(t.gamma[i], l + 1) * da[i];
    if (!t.theta.is_zero()) av += DensityElement(t.theta, l + 2) * va;
    r += av * vb;
  }
  return r;
}

std::vector<SuperFunction> bivector_divergence(const Bivector& s) {
  const Dimension& d = s.dimension();
  std::vector<SuperFunction> out;
  for (unsigned i = 0; i < d.size(); ++i) {
    SuperFunction v(d);
    for (unsigned j = 0; j < d.size(); ++j)
      v += signed_by(s(j, i).partial(j), koszul(d.parity(j), s.parity() + Parity::odd));
    out.push_back(v);
  }
  return out;
}

DensityOperator canonical_operator(const BracketTriple& t) {
  t.validate();
  const Dimension& d = t.dimension();
  const Weight& l = t.lambda;
  DensityOperator op(d);
  const std::vector<SuperFunction> div = bivector_divergence(t.s);
  SuperFunction gamma_div(d);
  for (unsigned k = 0; k < d.size(); ++k)
    gamma_div += signed_by(t.gamma[k].partial(k), koszul(d.parity(k), t.eps + Parity::odd));
  for (unsigned i = 0; i < d.size(); ++i) {
    for (unsigned j = 0; j < d.size(); ++j) op.add_term(t.s(i, j), l, {j, i});
    op.add_term(t.gamma[i] * mpq_class(2), l, {i}, 1);
    op.add_term(div[i] + t.gamma[i] * (l - 1), l, {i});
  }
  op.add_term(t.theta, l, {}, 2);
  op.add_term(gamma_div + t.theta * (l - 1), l, {}, 1);
  return op;
}

DensityOperator formal_adjoint(const DensityOperator& d) {
  const Dimension& dim = d.dimension();
  DensityOperator result(dim);
  DensityOperator one_minus_w = DensityOperator::identity(dim) - DensityOperator::weight(dim);
  for (const auto& [key, c] : d.terms()) {
    Parity pa = Parity::even;
    for (unsigned i : key.derivatives) pa = pa + dim.parity(i);
    DensityOperator left = DensityOperator::identity(dim);
    for (unsigned k = 0; k < key.weight_power; ++k) left = left * one_minus_w;
    for (unsigned i : key.derivatives) left = left * DensityOperator::derivative(dim, i);
    if (key.derivatives.size() % 2) left *= mpq_class(-1);
    for (Parity pc : {Parity::even, Parity::odd}) {
      SuperFunction part = parity_part(c, pc);
      if (part.is_zero()) continue;
      DensityOperator term = left * DensityOperator::multiplication(part, key.shift);
      if (koszul(pc, pa) < 0) term *= mpq_class(-1);
      result += term;
    }
  }
  return result;
}

// ---- projective Laplacian -----------------------------------------------

namespace {

void check_laplacian_data(const Bivector& s, const ProjectiveClass& pi) {
  const Dimension& d = s.dimension();
  if (!(pi.function_dimension() == d) || pi.parities() != coordinate_parities(d))
    throw Error(ErrorKind::DimensionMismatch, "S and the projective class live on different charts");
  require_regular_dimension(d.n0(), {-1, -3}, "the projective Laplacian");
}

SuperFunction s_pi_contraction(const Bivector& s, const ProjectiveClass& pi, unsigned i) {
  const Dimension& d = s.dimension();
  SuperFunction v(d);
  for (unsigned j = 0; j < d.size(); ++j)
    for (unsigned k = 0; k < d.size(); ++k)
      if (!s(j, k).is_zero() && !pi(i, k, j).is_zero()) v += s(j, k) * pi(i, k, j);
  return v;
}

}  // namespace

DensityOperator projective_laplacian(const Bivector& s, const ProjectiveClass& pi) {
  check_laplacian_data(s, pi);
  const Dimension& d = s.dimension();
  const int n0 = d.n0();
  const std::vector<SuperFunction> div = bivector_divergence(s);
  DensityOperator op(d);
  for (unsigned i = 0; i < d.size(); ++i) {
    for (unsigned j = 0; j < d.size(); ++j) op.add_term(s(i, j), 0, {j, i});
    op.add_term(div[i] * ratio(2, n0 + 3) - s_pi_contraction(s, pi, i) * ratio(n0 + 1, n0 + 3), 0, {i});
  }
  return op;
}

std::vector<SuperFunction> upper_gamma(const Bivector& s, const ProjectiveClass& pi) {
  check_laplacian_data(s, pi);
  const Dimension& d = s.dimension();
  const std::vector<SuperFunction> div = bivector_divergence(s);
  std::vector<SuperFunction> g;
  for (unsigned i = 0; i < d.size(); ++i)
    g.push_back((div[i] + s_pi_contraction(s, pi, i)) * ratio(d.n0() + 1, d.n0() + 3));
  return g;
}

// ---- test family --------------------------------------------------------

std::vector<Weight> default_test_weights() { return {Weight(0), Weight(1, 2), Weight(1)}; }

std::vector<DensityElement> density_test_family(Dimension dim, unsigned max_degree, const std::vector<Weight>& weights) {
  std::vector<Polynomial::Exponents> exps{Polynomial::Exponents(dim.n, 0)};
  for (unsigned deg = 1; deg <= max_degree; ++deg) {
    std::set<Polynomial::Exponents> next;
    for (const auto& e : exps) {
      unsigned total = 0;
      for (auto v : e) total += v;
      if (total + 1 != deg) continue;
      for (unsigned i = 0; i < dim.n; ++i) {
        auto f = e;
        ++f[i];
        next.insert(f);
      }
    }
    exps.insert(exps.end(), next.begin(), next.end());
  }
  std::vector<DensityElement> family;
  for (const Weight& w : weights)
    for (const auto& e : exps)
      for (SuperFunction::Mask mask = 0; mask < (SuperFunction::Mask{1} << dim.m); ++mask)
        family.emplace_back(
            SuperFunction::odd_monomial(dim, mask, RationalFunction(Polynomial::monomial(e, mpq_class(1)))), w);
  return family;
}

}  // namespace superproj
