#pragma once

#include <stdexcept>
#include <string>

namespace hjfbio {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument (size, sign, ordering) was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The requested quantity needs an oracle capability the problem lacks
/// (second-order evaluators, closed-form lower solution, ...).
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A solver iterate became non-finite or left the admissible magnitude.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& quantity, long iteration)
      : Error("divergence at iteration " + std::to_string(iteration) + ": " + quantity +
              " is not finite or exceeds the magnitude cap"),
        quantity_(quantity),
        iteration_(iteration) {}

  const std::string& quantity() const { return quantity_; }
  long iteration() const { return iteration_; }

 private:
  std::string quantity_;
  long iteration_;
};

}  // namespace hjfbio
