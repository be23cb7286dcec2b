#pragma once

#include <string>
#include <variant>

#include "hjfbio/numerics.hpp"

namespace hjfbio {

/// Convex, possibly nonsmooth upper-level term phi(x).
class Regularizer {
 public:
  struct Zero {};
  struct Box {
    Vector lo;
    Vector hi;
  };
  struct L1 {
    double weight;
  };

  Regularizer() = default;

  static Regularizer zero() { return Regularizer(Zero{}); }
  /// Indicator of {lo <= x <= hi}; throws unless lo <= hi elementwise.
  static Regularizer box(Vector lo, Vector hi);
  /// Same bounds in every coordinate.
  static Regularizer box(Index dim, double lo, double hi);
  static Regularizer l1(double weight);

  bool is_zero() const { return std::holds_alternative<Zero>(variant_); }
  const std::variant<Zero, Box, L1>& variant() const { return variant_; }

  /// phi(x); +inf outside the box for the indicator.
  double value(const Vector& x) const;

  /// argmin_z { phi(z) + |z - x|^2 / (2 gamma) }.
  Vector prox(double gamma, const Vector& x) const;

  /// Text form: "zero", "box:<lo>:<hi>" (scalar bounds), "l1:<weight>".
  std::string describe() const;
  /// Parses describe()'s format; `dim` sizes scalar box bounds.
  static Regularizer parse(const std::string& text, Index dim);

 private:
  explicit Regularizer(std::variant<Zero, Box, L1> v) : variant_(std::move(v)) {}

  std::variant<Zero, Box, L1> variant_{Zero{}};
};

inline Vector prox(const Regularizer& reg, double gamma, const Vector& x) {
  return reg.prox(gamma, x);
}

/// argmin_z { <w, z> + |z - x|^2 / (2 gamma) + phi(z) } = prox(x - gamma w).
Vector prox_step(const Vector& x, const Vector& w, double gamma, const Regularizer& reg);

/// (x - prox_step(x, grad, gamma, reg)) / gamma.
Vector gradient_mapping(const Vector& x, const Vector& grad, double gamma, const Regularizer& reg);

}  // namespace hjfbio
