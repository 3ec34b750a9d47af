#include "superproj/polynomial.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace superproj {

namespace {

void trim(Polynomial::Exponents& e) {
  while (!e.empty() && e.back() == 0) e.pop_back();
}

std::uint16_t exponent(const Polynomial::Exponents& e, std::size_t var) {
  return var < e.size() ? e[var] : 0;
}

Polynomial::Exponents add_exponents(const Polynomial::Exponents& a, const Polynomial::Exponents& b) {
  Polynomial::Exponents r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = static_cast<std::uint16_t>(r[i] + b[i]);
  trim(r);
  return r;
}

bool divides(const Polynomial::Exponents& d, const Polynomial::Exponents& e) {
  if (d.size() > e.size()) return false;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > e[i]) return false;
  return true;
}

Polynomial::Exponents sub_exponents(const Polynomial::Exponents& e, const Polynomial::Exponents& d) {
  Polynomial::Exponents r = e;
  for (std::size_t i = 0; i < d.size(); ++i) r[i] = static_cast<std::uint16_t>(r[i] - d[i]);
  trim(r);
  return r;
}

}  // namespace

Polynomial::Polynomial(const mpq_class& constant) {
  if (constant != 0) terms_.emplace(Exponents{}, constant);
}

Polynomial Polynomial::variable(std::size_t var) {
  Exponents e(var + 1, 0);
  e[var] = 1;
  return monomial(std::move(e), 1);
}

Polynomial Polynomial::monomial(Exponents exps, const mpq_class& coeff) {
  Polynomial p;
  trim(exps);
  if (coeff != 0) p.terms_.emplace(std::move(exps), coeff);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

mpq_class Polynomial::constant_term() const {
  auto it = terms_.find(Exponents{});
  return it == terms_.end() ? mpq_class(0) : it->second;
}

std::size_t Polynomial::num_vars() const {
  std::size_t n = 0;
  for (const auto& [e, c] : terms_) n = std::max(n, e.size());
  return n;
}

unsigned Polynomial::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max<unsigned>(d, exponent(e, var));
  return d;
}

unsigned Polynomial::total_degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (auto x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

Polynomial Polynomial::coefficient_in(std::size_t var, unsigned d) const {
  Polynomial r;
  for (const auto& [e, c] : terms_) {
    if (exponent(e, var) != d) continue;
    Exponents f = e;
    if (var < f.size()) f[var] = 0;
    trim(f);
    r.terms_.emplace(std::move(f), c);
  }
  return r;
}

Polynomial Polynomial::leading_coefficient_in(std::size_t var) const {
  return coefficient_in(var, degree_in(var));
}

const mpq_class& Polynomial::leading_coefficient() const {
  if (terms_.empty()) throw std::logic_error("leading coefficient of zero polynomial");
  return terms_.rbegin()->second;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  Polynomial r;
  for (const auto& [e, c] : terms_) {
    auto k = exponent(e, var);
    if (k == 0) continue;
    Exponents f = e;
    f[var] = static_cast<std::uint16_t>(k - 1);
    trim(f);
    r.add_term(f, c * k);
  }
  return r;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result(1);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k > 0) base = base * base;
  }
  return result;
}

void Polynomial::add_term(const Exponents& e, const mpq_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) r.add_term(add_exponents(ea, eb), ca * cb);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (b.is_constant()) return a * mpq_class(1 / b.constant_term());
  Polynomial q;
  Polynomial r = a;
  const auto& [lb_exp, lb_coeff] = *b.terms_.rbegin();
  while (!r.is_zero()) {
    const auto& [lr_exp, lr_coeff] = *r.terms_.rbegin();
    if (!divides(lb_exp, lr_exp)) return std::nullopt;
    Polynomial t = monomial(sub_exponents(lr_exp, lb_exp), lr_coeff / lb_coeff);
    q += t;
    r -= t * b;
  }
  return q;
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  mpq_class inv = 1 / leading_coefficient();
  return *this * inv;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    std::ostringstream factors;
    bool any = false;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (any) factors << '*';
      factors << (v < names.size() ? names[v] : "v" + std::to_string(v));
      if (e[v] > 1) factors << '^' << e[v];
      any = true;
    }
    mpq_class mag = abs(c);
    std::string term;
    if (!any) {
      term = mag.get_str();
    } else if (mag == 1) {
      term = factors.str();
    } else {
      term = mag.get_str() + "*" + factors.str();
    }
    if (first) {
      out << (c < 0 ? "-" : "") << term;
    } else {
      out << (c < 0 ? " - " : " + ") << term;
    }
    first = false;
  }
  return out.str();
}

Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, std::size_t var) {
  const unsigned db = b.degree_in(var);
  const Polynomial lb = b.leading_coefficient_in(var);
  Polynomial r = a;
  while (!r.is_zero()) {
    const unsigned dr = r.degree_in(var);
    if (dr < db) break;
    Polynomial lr = r.leading_coefficient_in(var);
    Polynomial shift = Polynomial::variable(var).pow(dr - db);
    r = lb * r - lr * shift * b;
  }
  return r;
}

Polynomial content_in(const Polynomial& a, std::size_t var) {
  Polynomial g;
  const unsigned d = a.degree_in(var);
  for (unsigned k = 0; k <= d; ++k) {
    Polynomial c = a.coefficient_in(var, k);
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

namespace {

Polynomial primitive_part(const Polynomial& a, std::size_t var) {
  Polynomial c = content_in(a, var);
  auto q = Polynomial::divide_exact(a, c);
  return q->monic();
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Polynomial(1);
  if (a == b) return a.monic();

  const std::size_t var = std::max(a.num_vars(), b.num_vars()) - 1;
  if (a.degree_in(var) == 0) return gcd(a, content_in(b, var));
  if (b.degree_in(var) == 0) return gcd(content_in(a, var), b);

  // Cheap exact-division shortcut covers the common case of one argument
  // dividing the other.
  if (a.total_degree() <= b.total_degree()) {
    if (Polynomial::divide_exact(b, a)) return a.monic();
  } else if (Polynomial::divide_exact(a, b)) {
    return b.monic();
  }

  Polynomial ca = content_in(a, var);
  Polynomial cb = content_in(b, var);
  Polynomial g_content = gcd(ca, cb);
  Polynomial p = *Polynomial::divide_exact(a, ca);
  Polynomial q = *Polynomial::divide_exact(b, cb);
  if (p.degree_in(var) < q.degree_in(var)) std::swap(p, q);
  while (!q.is_zero()) {
    Polynomial r = pseudo_remainder(p, q, var);
    p = std::move(q);
    if (r.is_zero()) {
      q = Polynomial();
    } else if (r.degree_in(var) == 0) {
      p = Polynomial(1);
      q = Polynomial();
    } else {
      q = primitive_part(r, var);
    }
  }
  Polynomial g = p.is_constant() ? Polynomial(1) : primitive_part(p, var);
  return (g * g_content).monic();
}

}  // namespace superproj
