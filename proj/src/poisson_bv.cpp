#include "superproj/poisson_bv.hpp"

#include <bit>

namespace superproj {

namespace {

SuperFunction signed_by(const SuperFunction& f, int sign) { return sign < 0 ? -f : f; }

SuperFunction parity_part(const SuperFunction& f, Parity p) {
  SuperFunction out(f.dimension());
  for (const auto& [mask, c] : f.terms())
    if (parity_of(std::popcount(mask)) == p) out += SuperFunction::odd_monomial(f.dimension(), mask, c);
  return out;
}

Parity momentum_parity(const Dimension& d, const PhaseFunction::Exponents& e) {
  Parity p = Parity::even;
  for (unsigned a = d.n; a < d.size(); ++a)
    if (e[a] % 2) p = p + Parity::odd;
  return p;
}

std::pair<PhaseFunction, PhaseFunction> split(const PhaseFunction& f) {
  PhaseFunction parts[2] = {PhaseFunction(f.dimension()), PhaseFunction(f.dimension())};
  for (const auto& [e, c] : f.terms()) {
    PhaseFunction mono(f.dimension());
    mono = PhaseFunction(SuperFunction(f.dimension(), 1));
    for (unsigned a = 0; a < e.size(); ++a)
      for (unsigned k = 0; k < e[a]; ++k) mono = mono * PhaseFunction::momentum(f.dimension(), a);
    const Parity mp = momentum_parity(f.dimension(), e);
    for (Parity q : {Parity::even, Parity::odd}) {
      SuperFunction part = parity_part(c, q);
      if (!part.is_zero()) parts[bit(q + mp)] += PhaseFunction(part) * mono;
    }
  }
  return {parts[0], parts[1]};
}

}  // namespace

// ---- PhaseFunction --------------------------------------------------------

PhaseFunction::PhaseFunction(const SuperFunction& f) : dim_(f.dimension()) {
  if (!f.is_zero()) terms_.emplace(Exponents(dim_.size(), 0), f);
}

PhaseFunction PhaseFunction::momentum(Dimension dim, unsigned a) {
  if (a >= dim.size()) throw Error(ErrorKind::UnknownCoordinate, "momentum index out of range");
  PhaseFunction p(dim);
  Exponents e(dim.size(), 0);
  e[a] = 1;
  p.terms_.emplace(e, SuperFunction(dim, 1));
  return p;
}

void PhaseFunction::accumulate(const Exponents& e, const SuperFunction& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

std::optional<Parity> PhaseFunction::parity() const {
  std::optional<Parity> result;
  for (const auto& [e, c] : terms_) {
    auto cp = c.parity();
    if (!cp) return std::nullopt;
    Parity p = *cp + momentum_parity(dim_, e);
    if (result && *result != p) return std::nullopt;
    result = p;
  }
  return result ? result : Parity::even;
}

Parity PhaseFunction::homogeneous_parity() const {
  auto p = parity();
  if (!p) throw Error(ErrorKind::NonHomogeneous, "phase function " + to_string() + " has mixed parity");
  return *p;
}

unsigned PhaseFunction::momentum_degree() const {
  unsigned deg = 0;
  for (const auto& [e, c] : terms_) {
    unsigned total = 0;
    for (unsigned v : e) total += v;
    deg = std::max(deg, total);
  }
  return deg;
}

SuperFunction PhaseFunction::function_part() const {
  auto it = terms_.find(Exponents(dim_.size(), 0));
  return it == terms_.end() ? SuperFunction(dim_) : it->second;
}

PhaseFunction PhaseFunction::partial_x(unsigned i) const {
  PhaseFunction out(dim_);
  for (const auto& [e, c] : terms_) out.accumulate(e, c.partial(i));
  return out;
}

PhaseFunction PhaseFunction::partial_p(unsigned a) const {
  PhaseFunction out(dim_);
  const Parity pa = dim_.parity(a);
  for (const auto& [e, c] : terms_) {
    if (e[a] == 0) continue;
    Parity before = Parity::even;
    for (unsigned b = 0; b < a; ++b)
      if (e[b] % 2 && dim_.is_odd(b)) before = before + Parity::odd;
    Exponents f = e;
    --f[a];
    for (Parity q : {Parity::even, Parity::odd}) {
      SuperFunction part = parity_part(c, q);
      if (part.is_zero()) continue;
      out.accumulate(f, signed_by(part, koszul(pa, q + before)) * mpq_class(e[a]));
    }
  }
  return out;
}

PhaseFunction& PhaseFunction::operator+=(const PhaseFunction& o) {
  if (terms_.empty() && !(dim_ == o.dim_)) dim_ = o.dim_;
  for (const auto& [e, c] : o.terms_) accumulate(e, c);
  return *this;
}

PhaseFunction& PhaseFunction::operator-=(const PhaseFunction& o) {
  if (terms_.empty() && !(dim_ == o.dim_)) dim_ = o.dim_;
  for (const auto& [e, c] : o.terms_) accumulate(e, -c);
  return *this;
}

PhaseFunction& PhaseFunction::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

PhaseFunction PhaseFunction::operator-() const {
  PhaseFunction r = *this;
  return r *= mpq_class(-1);
}

PhaseFunction operator*(const PhaseFunction& a, const PhaseFunction& b) {
  const Dimension& d = a.dim_;
  PhaseFunction out(d);
  for (const auto& [e1, c1] : a.terms_) {
    const Parity mp1 = momentum_parity(d, e1);
    for (const auto& [e2, c2] : b.terms_) {
      int sign = 1;
      bool vanishes = false;
      PhaseFunction::Exponents e(d.size(), 0);
      for (unsigned k = 0; k < d.size(); ++k) e[k] = e1[k] + e2[k];
      for (unsigned p = d.n; p < d.size() && !vanishes; ++p) {
        if (!e1[p]) continue;
        if (e2[p]) vanishes = true;
        for (unsigned q = d.n; q < p; ++q)
          if (e2[q]) sign = -sign;
      }
      if (vanishes) continue;
      for (Parity q : {Parity::even, Parity::odd}) {
        SuperFunction part = parity_part(c2, q);
        if (part.is_zero()) continue;
        out.accumulate(e, signed_by(c1 * part, sign * koszul(mp1, q)));
      }
    }
  }
  return out;
}

std::string PhaseFunction::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [e, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + c.to_string() + ")";
    for (unsigned a = 0; a < e.size(); ++a) {
      if (!e[a]) continue;
      out += "*p_" + dim_.coordinate_name(a);
      if (e[a] > 1) out += "^" + std::to_string(e[a]);
    }
  }
  return out;
}

// ---- brackets -------------------------------------------------------------

PhaseFunction canonical_pb(const PhaseFunction& f, const PhaseFunction& g) {
  const Dimension& d = f.dimension().size() ? f.dimension() : g.dimension();
  PhaseFunction out(d);
  if (f.is_zero() || g.is_zero()) return out;
  auto [even, odd] = split(f);
  for (Parity fp : {Parity::even, Parity::odd}) {
    const PhaseFunction& part = fp == Parity::even ? even : odd;
    if (part.is_zero()) continue;
    for (unsigned a = 0; a < d.size(); ++a) {
      const Parity pa = d.parity(a);
      PhaseFunction term = part.partial_p(a) * g.partial_x(a);
      PhaseFunction other = part.partial_x(a) * g.partial_p(a);
      if (pa == Parity::odd) term += other;
      else term -= other;
      out += koszul(pa, fp + Parity::odd) < 0 ? -term : term;
    }
  }
  return out;
}

PhaseFunction master_hamiltonian(const Bivector& s) {
  const Dimension& d = s.dimension();
  PhaseFunction out(d);
  for (unsigned i = 0; i < d.size(); ++i)
    for (unsigned j = 0; j < d.size(); ++j)
      if (!s(i, j).is_zero())
        out += PhaseFunction(s(i, j)) * PhaseFunction::momentum(d, j) * PhaseFunction::momentum(d, i);
  return out * mpq_class(1, 2);
}

PhaseFunction linear_hamiltonian(const std::vector<SuperFunction>& gamma) {
  if (gamma.empty()) return PhaseFunction();
  const Dimension d = gamma.front().dimension();
  PhaseFunction out(d);
  for (unsigned i = 0; i < gamma.size(); ++i)
    if (!gamma[i].is_zero()) out += PhaseFunction(gamma[i]) * PhaseFunction::momentum(d, i);
  return out;
}

SuperFunction hamiltonian_bracket(const PhaseFunction& s, const SuperFunction& f, const SuperFunction& g) {
  if (s.momentum_degree() > 2) throw Error(ErrorKind::ValidationError, "master Hamiltonian of momentum degree above 2");
  s.homogeneous_parity();
  f.homogeneous_parity();
  g.homogeneous_parity();
  return canonical_pb(canonical_pb(s, PhaseFunction(f)), PhaseFunction(g)).function_part();
}

PhaseFunction jacobi_obstruction(const PhaseFunction& s) {
  s.homogeneous_parity();
  return canonical_pb(s, s);
}

std::optional<JacobiWitness> find_jacobi_witness(const PhaseFunction& s, unsigned max_degree) {
  const Dimension& d = s.dimension();
  std::vector<SuperFunction> family;
  for (unsigned i = 0; i < d.size(); ++i) family.push_back(SuperFunction::coordinate(d, i));
  if (max_degree >= 2)
    for (const auto& e : density_test_family(d, max_degree, {Weight(0)})) {
      SuperFunction f = e.coefficient(0);
      if (std::find(family.begin(), family.end(), f) == family.end() && !f.is_even_constant()) family.push_back(f);
    }
  std::function<SuperFunction(const SuperFunction&, const SuperFunction&)> odd =
      [&](const SuperFunction& a, const SuperFunction& b) {
        if (a.is_zero() || b.is_zero()) return SuperFunction(d);
        SuperFunction v = hamiltonian_bracket(s, a, b);
        return a.homogeneous_parity() == Parity::odd ? -v : v;
      };
  for (const auto& a : family)
    for (const auto& b : family)
      for (const auto& c : family) {
        SuperFunction j = jacobiator(a, b, c, odd);
        if (!j.is_zero()) return JacobiWitness{{a, b, c}, j};
      }
  return std::nullopt;
}

// ---- reports --------------------------------------------------------------

bool ConditionReport::satisfied() const {
  for (const auto& r : residuals)
    if (!r.zero) return false;
  return true;
}

std::optional<bool> ConditionReport::verdict(const std::string& name) const {
  for (const auto& [n, v] : verdicts)
    if (n == name) return v;
  return std::nullopt;
}

void ConditionReport::add(std::string label, const SuperFunction& f) {
  residuals.push_back({std::move(label), f.to_string(), f.is_zero()});
}

void ConditionReport::add(std::string label, const PhaseFunction& f) {
  residuals.push_back({std::move(label), f.to_string(), f.is_zero()});
}

// ---- BV -------------------------------------------------------------------

namespace {

void require_odd(const Bivector& s) {
  if (s.parity() != Parity::odd) throw Error(ErrorKind::WrongParity, "an odd Poisson structure needs an odd S");
}

std::string index_label(const Dimension& d, std::initializer_list<unsigned> idx) {
  std::string out;
  for (unsigned i : idx) out += (out.empty() ? "" : ",") + d.coordinate_name(i);
  return out;
}

}  // namespace

ConditionReport bv_check(const Bivector& s, const ProjectiveClass& pi, unsigned max_degree) {
  require_odd(s);
  const Dimension& d = s.dimension();
  const int n0 = d.n0();
  require_regular_dimension(n0, {-1, -3}, "the BV conditions");
  DensityOperator lap = projective_laplacian(s, pi);
  ConditionReport report;
  const PhaseFunction sh = master_hamiltonian(s);
  report.add("(S,S)", jacobi_obstruction(sh));

  const std::vector<SuperFunction> div = bivector_divergence(s);
  std::vector<SuperFunction> t;
  for (unsigned i = 0; i < d.size(); ++i) {
    SuperFunction contraction(d);
    for (unsigned j = 0; j < d.size(); ++j)
      for (unsigned k = 0; k < d.size(); ++k) contraction += s(j, k) * pi(i, k, j);
    t.push_back(div[i] * ratio(2, n0 + 3) - contraction * ratio(n0 + 1, n0 + 3));
  }
  auto second_order = [&](const SuperFunction& f) {
    SuperFunction v(d);
    for (unsigned j = 0; j < d.size(); ++j)
      for (unsigned k = 0; k < d.size(); ++k)
        if (!s(j, k).is_zero()) v += s(j, k) * f.partial(j).partial(k);
    return v;
  };
  auto along_t = [&](const SuperFunction& f) {
    SuperFunction v(d);
    for (unsigned k = 0; k < d.size(); ++k)
      if (!t[k].is_zero()) v += t[k] * f.partial(k);
    return v;
  };
  for (unsigned i = 0; i < d.size(); ++i)
    report.add("T-line[" + index_label(d, {i}) + "]", second_order(t[i]) + along_t(t[i]));
  for (unsigned i = 0; i < d.size(); ++i)
    for (unsigned j = i; j < d.size(); ++j) {
      SuperFunction v = second_order(s(i, j)) + along_t(s(i, j));
      for (unsigned k = 0; k < d.size(); ++k) {
        v += signed_by(s(i, k) * t[j].partial(k), koszul(d.parity(j), Parity::odd));
        v += signed_by(s(j, k) * t[i].partial(k), koszul(d.parity(i), d.parity(j) + Parity::odd));
      }
      report.add("S-line[" + index_label(d, {i, j}) + "]", v);
    }
  report.verdicts.emplace_back("formula", report.satisfied());

  const DensityOperator square = lap * lap;
  bool direct = true;
  for (const auto& f : density_test_family(d, max_degree, {Weight(0)}))
    if (!square.apply(f).is_zero()) {
      direct = false;
      report.notes.push_back("Delta^2(" + f.to_string() + ") = " + square.apply(f).to_string());
      break;
    }
  report.verdicts.emplace_back("direct", direct);
  const int order = op_order(square);
  report.verdicts.emplace_back("ord_le_3", order <= 3);
  report.verdicts.emplace_back("ord_le_2", order <= 2);
  if (!report.residuals.front().zero)
    if (auto w = find_jacobi_witness(sh)) {
      report.notes.push_back("Jacobi witness (" + w->arguments[0].to_string() + ", " + w->arguments[1].to_string() +
                             ", " + w->arguments[2].to_string() + ") -> " + w->jacobiator.to_string());
    }
  return report;
}

// ---- density brackets -----------------------------------------------------

namespace {

void require_odd_weight_zero(const BracketTriple& t) {
  t.validate();
  if (t.lambda != 0) throw Error(ErrorKind::WrongWeight, "the Jacobi conditions need a bracket of weight 0");
  if (t.eps != Parity::odd) throw Error(ErrorKind::WrongParity, "the Jacobi conditions need an odd bracket");
}

std::vector<SuperFunction> log_derivatives(const SuperFunction& rho) {
  const Dimension& d = rho.dimension();
  if (rho.homogeneous_parity() != Parity::even) throw Error(ErrorKind::WrongParity, "a volume form must be even");
  const SuperFunction inv = rho.inverse();
  std::vector<SuperFunction> out;
  for (unsigned i = 0; i < d.size(); ++i) out.push_back(rho.partial(i) * inv);
  return out;
}

}  // namespace

std::optional<std::array<DensityElement, 3>> density_jacobi_witness(const BracketTriple& t, unsigned max_degree) {
  require_odd_weight_zero(t);
  const Dimension& d = t.dimension();
  std::vector<DensityElement> family;
  for (unsigned i = 0; i < d.size(); ++i) family.emplace_back(SuperFunction::coordinate(d, i));
  family.push_back(DensityElement::volume(d, 1));
  if (max_degree >= 2)
    for (const auto& e : density_test_family(d, max_degree, {Weight(0), Weight(1)}))
      if (std::find(family.begin(), family.end(), e) == family.end() && !(e == DensityElement(SuperFunction(d, 1))))
        family.push_back(e);
  std::function<DensityElement(const DensityElement&, const DensityElement&)> odd =
      [&](const DensityElement& a, const DensityElement& b) {
        if (a.is_zero() || b.is_zero()) return DensityElement(d);
        DensityElement v = bracket_from_triple(t, a, b);
        return a.homogeneous_parity() == Parity::odd ? -v : v;
      };
  for (const auto& a : family)
    for (const auto& b : family)
      for (const auto& c : family)
        if (!jacobiator(a, b, c, odd).is_zero()) return std::array<DensityElement, 3>{a, b, c};
  return std::nullopt;
}

ConditionReport density_jacobi_check(const BracketTriple& t, unsigned max_degree) {
  require_odd_weight_zero(t);
  const PhaseFunction s = master_hamiltonian(t.s);
  const PhaseFunction g = linear_hamiltonian(t.gamma);
  const PhaseFunction th(t.theta);
  ConditionReport report;
  report.add("(S,S)", canonical_pb(s, s));
  report.add("(S,gamma)", canonical_pb(s, g));
  report.add("(S,theta)+(gamma,gamma)", canonical_pb(s, th) + canonical_pb(g, g));
  report.add("(gamma,theta)", canonical_pb(g, th));
  report.verdicts.emplace_back("formula", report.satisfied());
  auto witness = density_jacobi_witness(t, max_degree);
  report.verdicts.emplace_back("direct", !witness.has_value());
  if (witness)
    report.notes.push_back("Jacobi witness (" + (*witness)[0].to_string() + ", " + (*witness)[1].to_string() + ", " +
                           (*witness)[2].to_string() + ")");
  return report;
}

void require_nondegenerate(const Bivector& s) {
  const Dimension& d = s.dimension();
  const Dimension body_dim{d.n, 0};
  SuperMatrix m(IndexParities(d.size(), Parity::even), body_dim);
  for (unsigned i = 0; i < d.size(); ++i)
    for (unsigned j = 0; j < d.size(); ++j) m(i, j) = SuperFunction(body_dim, s(i, j).body());
  if (even_determinant(m).is_zero()) throw Error(ErrorKind::Degenerate, "S is degenerate");
}

ConditionReport symplectic_canonical_check(const BracketTriple& t, const SuperFunction& rho) {
  require_odd_weight_zero(t);
  require_nondegenerate(t.s);
  const Dimension& d = t.dimension();
  const std::vector<SuperFunction> l = log_derivatives(rho);
  ConditionReport report;
  const PhaseFunction s = master_hamiltonian(t.s);
  report.add("(S,S)", canonical_pb(s, s));
  for (unsigned i = 0; i < d.size(); ++i) {
    SuperFunction v = t.gamma[i];
    for (unsigned j = 0; j < d.size(); ++j) v += t.s(i, j) * l[j];
    report.add("gamma[" + index_label(d, {i}) + "]", v);
  }
  SuperFunction v = t.theta;
  for (unsigned k = 0; k < d.size(); ++k) v += t.gamma[k] * l[k];
  report.add("theta", v);
  return report;
}

ProjectivePoissonResiduals projective_poisson_residuals(const Bivector& s, const ProjectiveClass& pi,
                                                        const SuperFunction& rho) {
  require_odd(s);
  require_nondegenerate(s);
  const Dimension& d = s.dimension();
  const int n0 = d.n0();
  require_regular_dimension(n0, {1, -1, -2, -3, -4}, "the projective Poisson conditions");
  const std::vector<SuperFunction> l = log_derivatives(rho);
  const std::vector<SuperFunction> div = bivector_divergence(s);
  ProjectivePoissonResiduals out;
  for (unsigned i = 0; i < d.size(); ++i) {
    SuperFunction v = div[i];
    for (unsigned j = 0; j < d.size(); ++j) {
      v += s(i, j) * l[j] * ratio(n0 + 3, n0 + 1);
      for (unsigned k = 0; k < d.size(); ++k) v += s(j, k) * pi(i, k, j);
    }
    out.pi_line.push_back(v);
  }
  const auto b = b_tensor(pi, BForm::thomas_lift);
  SuperFunction v(d);
  for (unsigned j = 0; j < d.size(); ++j)
    for (unsigned k = 0; k < d.size(); ++k) {
      v += s(j, k) * b[k][j];
      SuperFunction sl = s(k, j) * l[j];
      v -= signed_by(sl.partial(k), koszul(d.parity(k), s.parity() + Parity::odd));
      v -= s(k, j) * l[j] * l[k] * ratio(n0 + 2, n0 + 1);
    }
  out.b_line = v;
  return out;
}

ConditionReport projective_poisson_check(const Bivector& s, const ProjectiveClass& pi, const SuperFunction& rho) {
  const ProjectivePoissonResiduals r = projective_poisson_residuals(s, pi, rho);
  const Dimension& d = s.dimension();
  ConditionReport report;
  report.add("(S,S)", jacobi_obstruction(master_hamiltonian(s)));
  for (unsigned i = 0; i < d.size(); ++i) report.add("Pi-line[" + index_label(d, {i}) + "]", r.pi_line[i]);
  report.add("B-line", r.b_line);

  const BracketTriple ext = extend_bracket(s, Weight(0), pi);
  report.verdicts.emplace_back("extension_jacobi", density_jacobi_check(ext).satisfied());
  report.verdicts.emplace_back("extension_symplectic", symplectic_canonical_check(ext, rho).satisfied());
  return report;
}

}  // namespace superproj
