#include "superproj/thomas.hpp"

namespace superproj {

namespace {

SuperFunction signed_by(const SuperFunction& f, int sign) { return sign < 0 ? -f : f; }

void check_class(const ProjectiveClass& pi) {
  if (pi.parities() != coordinate_parities(pi.function_dimension()))
    throw Error(ErrorKind::DimensionMismatch, "expected a projective class on a base chart");
}

// (n0+1)/(n0-1) sum_q (d_q Pi^q_kj + quad_sign Pi^p_qk Pi^q_pj) (-1)^(q(1+k+j))
std::vector<std::vector<SuperFunction>> curvature_combination(const ProjectiveClass& pi, int quad_sign) {
  const Dimension& d = pi.function_dimension();
  const int n0 = d.n0();
  const mpq_class factor = ratio(n0 + 1, n0 - 1);
  std::vector<std::vector<SuperFunction>> out(d.size(), std::vector<SuperFunction>(d.size(), SuperFunction(d)));
  for (unsigned k = 0; k < d.size(); ++k)
    for (unsigned j = 0; j < d.size(); ++j) {
      SuperFunction v(d);
      for (unsigned q = 0; q < d.size(); ++q) {
        SuperFunction inner = pi(q, k, j).partial(q);
        for (unsigned p = 0; p < d.size(); ++p)
          if (!pi(p, q, k).is_zero() && !pi(q, p, j).is_zero()) inner += signed_by(pi(p, q, k) * pi(q, p, j), quad_sign);
        v += signed_by(inner, koszul(d.parity(q), Parity::odd + d.parity(k) + d.parity(j)));
      }
      out[k][j] = v * factor;
    }
  return out;
}

}  // namespace

IndexParities tilde_parities(const Dimension& base) {
  IndexParities p{Parity::even};
  for (unsigned i = 0; i < base.size(); ++i) p.push_back(base.parity(i));
  return p;
}

Sym2CovVec lift_connection(const ProjectiveClass& pi) {
  check_class(pi);
  const Dimension& d = pi.function_dimension();
  const int n0 = d.n0();
  require_regular_dimension(n0, {1, -1}, "the lifted connection");
  Sym2CovVec g(tilde_parities(d), d);
  for (unsigned k = 0; k < d.size(); ++k)
    for (unsigned i = 0; i < d.size(); ++i)
      for (unsigned j = 0; j < d.size(); ++j) g.raw(k + 1, i + 1, j + 1) = pi(k, i, j);
  const SuperFunction diag(d, ratio(-1, n0 + 1));
  for (unsigned c = 0; c <= d.size(); ++c) {
    g.raw(c, 0, c) = diag;
    g.raw(c, c, 0) = diag;
  }
  const auto g0 = curvature_combination(pi, -1);
  for (unsigned j = 0; j < d.size(); ++j)
    for (unsigned i = 0; i < d.size(); ++i) g.raw(0, j + 1, i + 1) = g0[j][i];
  return g;
}

Sym2CovVec lift_projective_class(const ProjectiveClass& pi) {
  check_class(pi);
  const Dimension& d = pi.function_dimension();
  const int n0 = d.n0();
  require_regular_dimension(n0, {1, -1, -2}, "the lifted projective class");
  Sym2CovVec p(tilde_parities(d), d);
  for (unsigned k = 0; k < d.size(); ++k)
    for (unsigned i = 0; i < d.size(); ++i)
      for (unsigned j = 0; j < d.size(); ++j) p.raw(k + 1, i + 1, j + 1) = pi(k, i, j);
  const SuperFunction mixed(d, ratio(-1, (n0 + 1) * (n0 + 2)));
  for (unsigned k = 1; k <= d.size(); ++k) {
    p.raw(k, k, 0) = mixed;
    p.raw(k, 0, k) = mixed;
  }
  p.raw(0, 0, 0) = SuperFunction(d, ratio(n0, (n0 + 1) * (n0 + 2)));
  const auto g0 = curvature_combination(pi, -1);
  for (unsigned j = 0; j < d.size(); ++j)
    for (unsigned i = 0; i < d.size(); ++i) p.raw(0, j + 1, i + 1) = g0[j][i];
  return p;
}

std::vector<std::vector<SuperFunction>> b_tensor(const ProjectiveClass& pi, BForm form) {
  check_class(pi);
  require_regular_dimension(pi.function_dimension().n0(), {1, -1}, "the B tensor");
  return curvature_combination(pi, form == BForm::as_printed ? 1 : -1);
}

namespace {

SuperFunction s_b_contraction(const Bivector& s, const std::vector<std::vector<SuperFunction>>& b) {
  const Dimension& d = s.dimension();
  SuperFunction v(d);
  for (unsigned j = 0; j < d.size(); ++j)
    for (unsigned k = 0; k < d.size(); ++k)
      if (!s(j, k).is_zero() && !b[k][j].is_zero()) v += s(j, k) * b[k][j];
  return v;
}

SuperFunction s_pi_contraction(const Bivector& s, const ProjectiveClass& pi, unsigned i) {
  const Dimension& d = s.dimension();
  SuperFunction v(d);
  for (unsigned j = 0; j < d.size(); ++j)
    for (unsigned k = 0; k < d.size(); ++k)
      if (!s(j, k).is_zero() && !pi(i, k, j).is_zero()) v += s(j, k) * pi(i, k, j);
  return v;
}

SuperFunction gamma_divergence(const std::vector<SuperFunction>& gamma, const Dimension& d, Parity s_parity) {
  SuperFunction v(d);
  for (unsigned k = 0; k < d.size(); ++k)
    v += signed_by(gamma[k].partial(k), koszul(d.parity(k), s_parity + Parity::odd));
  return v;
}

void check_pair(const Bivector& s, const ProjectiveClass& pi) {
  check_class(pi);
  if (!(s.dimension() == pi.function_dimension()))
    throw Error(ErrorKind::DimensionMismatch, "S and the projective class live on different charts");
}

}  // namespace

DensityOperator extension_operator(const BracketTriple& t, const ProjectiveClass& pi, BForm form) {
  t.validate();
  check_pair(t.s, pi);
  const Dimension& d = t.dimension();
  const int n0 = d.n0();
  require_regular_dimension(n0, {1, -1, -2, -3, -4}, "the extension operator");
  const Weight& l = t.lambda;
  const mpq_class big_n = n0 + 1;
  const mpq_class a = ratio(2, n0 + 4);
  const mpq_class b = 2 * (l * big_n + 1) / (big_n * (n0 + 4));
  const mpq_class c = ratio(n0 + 2, n0 + 4);
  const mpq_class e = (2 * l * big_n - n0) / (big_n * (n0 + 4));

  const std::vector<SuperFunction> div = bivector_divergence(t.s);
  const auto bt = b_tensor(pi, form);
  DensityOperator op(d);
  for (unsigned i = 0; i < d.size(); ++i) {
    for (unsigned j = 0; j < d.size(); ++j) op.add_term(t.s(i, j), l, {j, i});
    op.add_term(t.gamma[i] * mpq_class(2), l, {i}, 1);
    op.add_term(div[i] * a + t.gamma[i] * b - s_pi_contraction(t.s, pi, i) * c, l, {i});
  }
  op.add_term(t.theta, l, {}, 2);
  op.add_term(gamma_divergence(t.gamma, d, t.eps) * a + t.theta * e - s_b_contraction(t.s, bt) * c, l, {}, 1);
  return op;
}

std::pair<std::vector<SuperFunction>, SuperFunction> gamma_theta_from_s(const Bivector& s, const Weight& lambda,
                                                                        const ProjectiveClass& pi, BForm form) {
  check_pair(s, pi);
  const Dimension& d = s.dimension();
  const int n0 = d.n0();
  require_regular_dimension(n0, {1, -1}, "the extension of S");
  const mpq_class big_n = n0 + 1;
  const mpq_class den_gamma = (n0 + 3) - lambda * big_n;
  const mpq_class den_theta = (n0 + 2) - lambda * big_n;
  if (den_gamma == 0 || den_theta == 0)
    throw Error(ErrorKind::SingularWeight, "weight " + lambda.get_str() + " is singular when n - m = " + std::to_string(n0));

  const std::vector<SuperFunction> div = bivector_divergence(s);
  std::vector<SuperFunction> gamma;
  for (unsigned i = 0; i < d.size(); ++i) gamma.push_back((div[i] + s_pi_contraction(s, pi, i)) * (big_n / den_gamma));
  const SuperFunction sb = s_b_contraction(s, b_tensor(pi, form));
  SuperFunction theta = gamma_divergence(gamma, d, s.parity());
  theta += form == BForm::as_printed ? -sb : sb;
  theta *= big_n / den_theta;
  return {gamma, theta};
}

BracketTriple extend_bracket(const Bivector& s, const Weight& lambda, const ProjectiveClass& pi, BForm form) {
  require_regular_dimension(s.dimension().n0(), {1, -1, -2, -3, -4}, "the bracket extension");
  auto [gamma, theta] = gamma_theta_from_s(s, lambda, pi, form);
  return BracketTriple(s, std::move(gamma), std::move(theta), lambda);
}

Sym2CovVec pullback_tilde_connection(const Sym2CovVec& gamma_new, const CoordinateChange& c) {
  const Dimension& d = c.dimension();
  const IndexParities par = tilde_parities(d);
  if (gamma_new.parities() != par) throw Error(ErrorKind::DimensionMismatch, "expected a connection on the extended chart");
  const unsigned n = d.size() + 1;
  const SuperMatrix base = jacobian(c);
  std::vector<SuperFunction> dlog;
  for (unsigned i = 0; i < d.size(); ++i) dlog.push_back(dlog_berezinian(c, i));

  SuperMatrix p(par, d);
  p(0, 0) = SuperFunction(d, 1);
  for (unsigned i = 0; i < d.size(); ++i) {
    p(i + 1, 0) = dlog[i];
    for (unsigned a = 0; a < d.size(); ++a) p(i + 1, a + 1) = base(i, a);
  }
  const SuperMatrix q = p.inverse();
  // d_I d_J xbar^S on the extended chart; nothing depends on x0
  auto second = [&](unsigned s, unsigned i, unsigned j) -> SuperFunction {
    if (i == 0 || j == 0) return SuperFunction(d);
    if (s == 0) return dlog[j - 1].partial(i - 1);
    return c.forward()[s - 1].partial(j - 1).partial(i - 1);
  };
  std::vector<SuperFunction> pulled;
  for (unsigned k = 0; k < n; ++k)
    for (unsigned a = 0; a < n; ++a)
      for (unsigned b = 0; b < n; ++b) pulled.push_back(c.pull_back(gamma_new(k, a, b)));
  auto at = [&](unsigned k, unsigned a, unsigned b) -> const SuperFunction& { return pulled[(k * n + a) * n + b]; };

  Sym2CovVec out(par, d);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) {
      std::vector<SuperFunction> y;
      for (unsigned s = 0; s < n; ++s) {
        SuperFunction v = second(s, i, j);
        for (unsigned a = 0; a < n; ++a) {
          if (p(i, a).is_zero()) continue;
          for (unsigned b = 0; b < n; ++b) {
            if (p(j, b).is_zero() || at(s, a, b).is_zero()) continue;
            v += signed_by(p(j, b) * p(i, a) * at(s, a, b), koszul(par[i], par[j] + par[b]));
          }
        }
        y.push_back(v);
      }
      for (unsigned k = 0; k < n; ++k) {
        SuperFunction v(d);
        for (unsigned s = 0; s < n; ++s)
          if (!y[s].is_zero()) v += y[s] * q(s, k);
        out.raw(k, i, j) = v;
      }
    }
  return out;
}

}  // namespace superproj
