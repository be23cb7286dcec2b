#include "hjfbio/estimators.hpp"

#include <sstream>

#include "hjfbio/errors.hpp"

namespace hjfbio {

void FdConfig::validate() const {
  if (!(delta_eps > 0.0)) throw InvalidArgument("FdConfig: delta_eps must be positive");
}

std::optional<std::string> FdConfig::warning() const {
  if (delta_eps < 1e-9) {
    std::ostringstream msg;
    msg << "delta_eps = " << delta_eps
        << " is below 1e-9; central differences lose most significant digits";
    return msg.str();
  }
  return std::nullopt;
}

namespace {

void check_shapes(const BilevelOracle& oracle, const Vector& x, const Vector& y, const Vector& v) {
  if (x.size() != oracle.upper_dim() || y.size() != oracle.lower_dim() ||
      v.size() != oracle.lower_dim()) {
    throw InvalidArgument("estimator: dimension mismatch between x, y, v and the oracle");
  }
}

}  // namespace

Vector fd_hvp(const BilevelOracle& oracle, const Vector& x, const Vector& y, const Vector& v,
              const FdConfig& cfg) {
  check_shapes(oracle, x, y, v);
  const double d = cfg.delta_eps;
  const Vector step = d * v;
  return (oracle.grad_y_g(x, y + step) - oracle.grad_y_g(x, y - step)) / (2.0 * d);
}

Vector fd_jvp(const BilevelOracle& oracle, const Vector& x, const Vector& y, const Vector& v,
              const FdConfig& cfg) {
  check_shapes(oracle, x, y, v);
  const double d = cfg.delta_eps;
  const Vector step = d * v;
  return (oracle.grad_x_g(x, y + step) - oracle.grad_x_g(x, y - step)) / (2.0 * d);
}

Vector project_ball(const Vector& v, double r) {
  if (!(r > 0.0)) throw InvalidArgument("project_ball: radius must be positive");
  const double norm = v.norm();
  if (norm <= r) return v;
  return v * (r / norm);
}

Vector cap_norm(const Vector& h, double r_h) { return project_ball(h, r_h); }

Vector surrogate_hypergrad(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                           const Vector& v, const FdConfig& cfg) {
  return oracle.grad_x_f(x, y) - fd_jvp(oracle, x, y, v, cfg);
}

Vector r_grad_estimate(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                       const Vector& v, const FdConfig& cfg, double r_h) {
  return cap_norm(fd_hvp(oracle, x, y, v, cfg), r_h) - oracle.grad_y_f(x, y);
}

}  // namespace hjfbio
