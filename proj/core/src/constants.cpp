#include "hjfbio/constants.hpp"

#include <algorithm>
#include <sstream>

#include "hjfbio/errors.hpp"

namespace hjfbio {

void SmoothnessConstants::validate() const {
  for (double v : {mu, l_f, l_g, c_fy, c_fx, c_gxy, c_gy, l_gxy, l_gyy}) {
    if (!(v >= 0.0)) throw InvalidArgument("SmoothnessConstants: negative or NaN constant");
  }
  if (!(mu > 0.0)) throw InvalidArgument("SmoothnessConstants: mu must be positive");
  if (!(l_g >= mu)) throw InvalidArgument("SmoothnessConstants: requires l_g >= mu");
}

double SmoothnessConstants::l_y() const {
  return (c_gxy * l_gyy / (mu * mu) + l_gxy / mu) * (1.0 + c_gxy / mu);
}

double SmoothnessConstants::l_big_f() const {
  const double k = kappa();
  return (l_f + l_f * k + c_fy * (c_gxy * l_gyy / (mu * mu) + l_gxy / mu)) * (1.0 + k);
}

double SmoothnessConstants::l_big_g() const {
  const double k = kappa();
  return (l_g + l_g * k + c_gy * (c_gxy * l_gyy / (mu * mu) + l_gxy / mu)) * (1.0 + k);
}

double SmoothnessConstants::l_hat_sq() const {
  const double mu2 = mu * mu;
  return 4.0 * (l_f * l_f + l_gxy * l_gxy * c_fy * c_fy / mu2 +
                l_gyy * l_gyy * c_gxy * c_gxy * c_fy * c_fy / (mu2 * mu2) +
                l_f * l_f * c_gxy * c_gxy / mu2);
}

double SmoothnessConstants::l_breve_sq() const {
  const double mu2 = mu * mu;
  return l_f * l_f / mu2 + l_gyy * l_gyy * c_fx * c_fx / (mu2 * mu2);
}

std::array<double, 6> theorem1_gamma_terms(const SmoothnessConstants& c, double lambda, double tau,
                                           double r_v) {
  c.validate();
  return {
      1.0 / (2.0 * c.l_big_f()),
      lambda * c.mu / (16.0 * c.l_big_g()),
      c.mu / (16.0 * c.l_g * c.l_g),
      3.0 / (160.0 * c.l_breve_sq()),
      c.mu * tau / (30.0 * c.c_gxy * c.c_gxy),
      c.mu * c.mu * lambda / (30.0 * (c.l_f * c.l_f + r_v * r_v * c.l_gxy * c.l_gxy)),
  };
}

void check_theorem1_rates(const SmoothnessConstants& c, double lambda, double tau) {
  c.validate();
  const double lambda_max = std::min(1.0 / (2.0 * c.l_g), 3.0 / (80.0 * c.l_breve_sq()));
  const double tau_max = 1.0 / (6.0 * c.l_g);
  std::ostringstream msg;
  msg.precision(17);
  if (!(lambda > 0.0 && lambda <= lambda_max)) {
    msg << "lower step lambda = " << lambda << " violates 0 < lambda <= min(1/(2 L_g), "
        << "3/(80 L_breve^2)) = " << lambda_max;
    throw InvalidArgument(msg.str());
  }
  if (!(tau > 0.0 && tau <= tau_max)) {
    msg << "auxiliary step tau = " << tau << " violates 0 < tau <= 1/(6 L_g) = " << tau_max;
    throw InvalidArgument(msg.str());
  }
}

double theorem1_step_sizes(const SmoothnessConstants& c, double lambda, double tau, double r_v) {
  check_theorem1_rates(c, lambda, tau);
  if (!(r_v > 0.0)) throw InvalidArgument("theorem1_step_sizes: r_v must be positive");
  const auto terms = theorem1_gamma_terms(c, lambda, tau, r_v);
  return *std::min_element(terms.begin(), terms.end());
}

}  // namespace hjfbio
