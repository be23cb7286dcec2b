#pragma once

#include <array>

namespace hjfbio {

/// Problem constants entering the step-size conditions and error bounds.
/// Supplied per problem, never estimated online.
///
///   mu      PL constant of g(x, .), also the lower clamp of the Hessian
///   l_f     Lipschitz constant of grad_x f and grad_y f
///   l_g     Lipschitz constant of grad_x g and grad_y g
///   c_fy    bound on |grad_y f|
///   c_fx    bound on |grad_x f|
///   c_gxy   bound on |d^2 g / dx dy|
///   c_gy    bound on |grad_y g|
///   l_gxy   Lipschitz constant of d^2 g / dx dy
///   l_gyy   Lipschitz constant of d^2 g / dy^2
///
/// Derived quantities are recomputed from these on every call.
struct SmoothnessConstants {
  double mu = 1.0;
  double l_f = 1.0;
  double l_g = 1.0;
  double c_fy = 1.0;
  double c_fx = 1.0;
  double c_gxy = 1.0;
  double c_gy = 1.0;
  double l_gxy = 1.0;
  double l_gyy = 1.0;

  /// Throws InvalidArgument unless all constants are nonnegative and
  /// l_g >= mu > 0.
  void validate() const;

  double kappa() const { return c_gxy / mu; }
  double l_y() const;
  double l_big_f() const;  // L_F
  double l_big_g() const;  // L_G
  /// 4 (L_f^2 + L_gxy^2 C_fy^2 / mu^2 + L_gyy^2 C_gxy^2 C_fy^2 / mu^4
  ///    + L_f^2 C_gxy^2 / mu^2)
  double l_hat_sq() const;
  /// L_f^2 / mu^2 + L_gyy^2 C_fx^2 / mu^4
  double l_breve_sq() const;
  /// Default radius of the auxiliary-variable ball, C_fy / mu.
  double default_r_v() const { return c_fy / mu; }
};

/// The six candidate upper bounds on the upper-level step gamma, in order:
/// 1/(2 L_F), lambda mu / (16 L_G), mu / (16 L_g^2), 3 / (160 L_breve^2),
/// mu tau / (30 C_gxy^2), mu^2 lambda / (30 (L_f^2 + r_v^2 L_gxy^2)).
std::array<double, 6> theorem1_gamma_terms(const SmoothnessConstants& c, double lambda, double tau,
                                           double r_v);

/// Throws InvalidArgument naming the violated bound unless
/// 0 < lambda <= min(1/(2 L_g), 3/(80 L_breve^2)) and 0 < tau <= 1/(6 L_g).
void check_theorem1_rates(const SmoothnessConstants& c, double lambda, double tau);

/// Largest admissible gamma for the convergence guarantee, after checking
/// the lambda and tau bounds.
double theorem1_step_sizes(const SmoothnessConstants& c, double lambda, double tau, double r_v);

}  // namespace hjfbio
