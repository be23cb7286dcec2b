#pragma once

#include <atomic>
#include <cstdint>
#include <optional>

#include "hjfbio/numerics.hpp"

namespace hjfbio {

/// Evaluation interface of a bilevel problem
///
///   min_x  f(x, y*(x)) + phi(x)   s.t.  y*(x) in argmin_y g(x, y),
///
/// with x in R^d (upper) and y in R^p (lower). Implementations must be pure
/// functions of their inputs so one oracle can be shared read-only across
/// threads.
///
/// The four partial gradients are the only first-order calls the solver
/// makes. The second-order evaluators and the closed-form lower solution are
/// optional verification hooks; the defaults report them as unavailable.
class BilevelOracle {
 public:
  virtual ~BilevelOracle() = default;

  virtual Index upper_dim() const = 0;
  virtual Index lower_dim() const = 0;

  virtual double f(const Vector& x, const Vector& y) const = 0;
  virtual double g(const Vector& x, const Vector& y) const = 0;

  virtual Vector grad_x_f(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_y_f(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_x_g(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_y_g(const Vector& x, const Vector& y) const = 0;

  /// d^2 g / dy^2 (p x p).
  virtual std::optional<SymMatrix> hess_yy_g(const Vector&, const Vector&) const {
    return std::nullopt;
  }
  /// d^2 g / dx dy as a d x p matrix, so hess_xy_g * v approximates the
  /// directional change of grad_x g along v.
  virtual std::optional<Matrix> hess_xy_g(const Vector&, const Vector&) const {
    return std::nullopt;
  }
  /// A lower-level minimizer y*(x), when available in closed form.
  virtual std::optional<Vector> lower_solution(const Vector&) const { return std::nullopt; }
  /// G(x) = min_y g(x, y), when available in closed form.
  virtual std::optional<double> lower_value(const Vector&) const { return std::nullopt; }

  /// F(x) = f(x, y*(x)); empty when y*(x) is unavailable.
  std::optional<double> upper_value(const Vector& x) const;
};

/// Forwards to another oracle while counting first-order gradient calls.
/// The counter is atomic, so the wrapper stays shareable across threads.
class CountingOracle final : public BilevelOracle {
 public:
  explicit CountingOracle(const BilevelOracle& inner) : inner_(inner) {}

  std::uint64_t gradient_calls() const { return calls_.load(); }
  void reset() { calls_.store(0); }

  Index upper_dim() const override { return inner_.upper_dim(); }
  Index lower_dim() const override { return inner_.lower_dim(); }
  double f(const Vector& x, const Vector& y) const override { return inner_.f(x, y); }
  double g(const Vector& x, const Vector& y) const override { return inner_.g(x, y); }
  Vector grad_x_f(const Vector& x, const Vector& y) const override {
    ++calls_;
    return inner_.grad_x_f(x, y);
  }
  Vector grad_y_f(const Vector& x, const Vector& y) const override {
    ++calls_;
    return inner_.grad_y_f(x, y);
  }
  Vector grad_x_g(const Vector& x, const Vector& y) const override {
    ++calls_;
    return inner_.grad_x_g(x, y);
  }
  Vector grad_y_g(const Vector& x, const Vector& y) const override {
    ++calls_;
    return inner_.grad_y_g(x, y);
  }
  std::optional<SymMatrix> hess_yy_g(const Vector& x, const Vector& y) const override {
    return inner_.hess_yy_g(x, y);
  }
  std::optional<Matrix> hess_xy_g(const Vector& x, const Vector& y) const override {
    return inner_.hess_xy_g(x, y);
  }
  std::optional<Vector> lower_solution(const Vector& x) const override {
    return inner_.lower_solution(x);
  }
  std::optional<double> lower_value(const Vector& x) const override {
    return inner_.lower_value(x);
  }

 private:
  const BilevelOracle& inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

/// Throws InvalidArgument unless every gradient at (x, y) has the declared
/// dimension and the optional Hessians (if any) have consistent shapes.
void check_oracle_dimensions(const BilevelOracle& oracle, const Vector& x, const Vector& y);

}  // namespace hjfbio
