#pragma once

#include <optional>
#include <string>

#include "hjfbio/numerics.hpp"
#include "hjfbio/problem.hpp"

namespace hjfbio {

/// Finite-difference step for the Hessian/Jacobian-vector estimators.
struct FdConfig {
  double delta_eps = 1e-5;

  /// Throws InvalidArgument unless delta_eps > 0.
  void validate() const;
  /// A cancellation warning when delta_eps < 1e-9, empty otherwise.
  std::optional<std::string> warning() const;
};

/// [grad_y g(x, y + d v) - grad_y g(x, y - d v)] / (2 d). Two gradient calls.
Vector fd_hvp(const BilevelOracle& oracle, const Vector& x, const Vector& y, const Vector& v,
              const FdConfig& cfg);

/// [grad_x g(x, y + d v) - grad_x g(x, y - d v)] / (2 d). Two gradient calls.
Vector fd_jvp(const BilevelOracle& oracle, const Vector& x, const Vector& y, const Vector& v,
              const FdConfig& cfg);

/// Euclidean projection onto {|v| <= r}.
Vector project_ball(const Vector& v, double r);

/// Norm cap applied to an estimated Hessian-vector product; the computable
/// form of the clamped-Hessian projection, same formula as project_ball.
Vector cap_norm(const Vector& h, double r_h);

/// w = grad_x f(x, y) - fd_jvp(x, y, v). Three gradient calls.
Vector surrogate_hypergrad(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                           const Vector& v, const FdConfig& cfg);

/// h = cap_norm(fd_hvp(x, y, v), r_h) - grad_y f(x, y). Three gradient calls.
Vector r_grad_estimate(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                       const Vector& v, const FdConfig& cfg, double r_h);

}  // namespace hjfbio
