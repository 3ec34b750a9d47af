#pragma once

#include "superproj/densities.hpp"

namespace superproj {

/// Index parities of the extended chart: index 0 is the even coordinate x0,
/// index a + 1 is base coordinate a.
IndexParities tilde_parities(const Dimension& base);

/// Lifted connection on the extended chart:
///   Gt^k_ij = Pi^k_ij, Gt^c_0a = Gt^c_a0 = -delta^c_a / (n0 + 1),
///   Gt^0_ji = (n0+1)/(n0-1) (d_q Pi^q_ji - Pi^p_qj Pi^q_pi) (-1)^(q(1+i+j)).
/// Throws SingularDimension for n - m in {1, -1}.
Sym2CovVec lift_connection(const ProjectiveClass& pi);

/// Projective class of the lifted connection, with the components
///   Pt^k_ij = Pi^k_ij, Pt^k_j0 = -delta^k_j / ((n0+1)(n0+2)), Pt^0_i0 = 0,
///   Pt^k_00 = 0, Pt^0_00 = n0 / ((n0+1)(n0+2)), Pt^0_ji = Gt^0_ji.
/// Throws SingularDimension for n - m in {1, -1, -2}.
Sym2CovVec lift_projective_class(const ProjectiveClass& pi);

/// Which second-order curvature-like combination of Pi to use.
enum class BForm {
  /// (n0+1)/(n0-1) (d_q Pi^q_kj + Pi^p_qk Pi^q_pj) (-1)^(q(1+k+j)), as printed
  /// next to the extension operator.
  as_printed,
  /// The x0 component of the lifted connection, with the minus sign.
  thomas_lift,
};

/// B_kj. Throws SingularDimension for n - m in {1, -1}.
std::vector<std::vector<SuperFunction>> b_tensor(const ProjectiveClass& pi, BForm form = BForm::as_printed);

/// The canonical second-order operator of weight lambda on densities built
/// from a triple and a projective class (the projective Laplacian of the
/// extended chart, d0 realized as the weight operator). Throws
/// SingularDimension for n - m in {1, -1, -2, -3, -4}.
DensityOperator extension_operator(const BracketTriple& t, const ProjectiveClass& pi, BForm form = BForm::thomas_lift);

/// gamma^i = (n0+1)/((n0+3) - l(n0+1)) (d_j S^ji (-1)^(j(S+1)) + S^jk Pi^i_kj),
/// theta  = (n0+1)/((n0+2) - l(n0+1)) (d_k gamma^k (-1)^(k(S+1)) + sign S^jk B_kj)
/// with sign = +1 for the lifted B and -1 for the printed one.
/// Throws SingularWeight for l in {(n0+3)/(n0+1), (n0+2)/(n0+1)} and
/// SingularDimension for n - m in {1, -1}.
std::pair<std::vector<SuperFunction>, SuperFunction> gamma_theta_from_s(const Bivector& s, const Weight& lambda,
                                                                        const ProjectiveClass& pi,
                                                                        BForm form = BForm::thomas_lift);

/// Triple (S, gamma, theta) extending S to a bracket on densities. Guards as
/// extension_operator and gamma_theta_from_s.
BracketTriple extend_bracket(const Bivector& s, const Weight& lambda, const ProjectiveClass& pi,
                             BForm form = BForm::thomas_lift);

/// Extended change x0bar = x0 + log Ber, xbar = xbar(x): pulls a connection on
/// the new extended chart (functions of xbar) back to the old one.
Sym2CovVec pullback_tilde_connection(const Sym2CovVec& gamma_new, const CoordinateChange& c);

}  // namespace superproj
