#include "hjfbio/problem.hpp"

#include <string>

#include "hjfbio/errors.hpp"

namespace hjfbio {

std::optional<double> BilevelOracle::upper_value(const Vector& x) const {
  const auto y_star = lower_solution(x);
  if (!y_star) return std::nullopt;
  return f(x, *y_star);
}

namespace {

void expect_size(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw InvalidArgument(std::string("oracle: ") + what + " has dimension " +
                          std::to_string(v.size()) + ", expected " + std::to_string(n));
  }
}

}  // namespace

void check_oracle_dimensions(const BilevelOracle& oracle, const Vector& x, const Vector& y) {
  const Index d = oracle.upper_dim();
  const Index p = oracle.lower_dim();
  expect_size(x, d, "x");
  expect_size(y, p, "y");
  expect_size(oracle.grad_x_f(x, y), d, "grad_x f");
  expect_size(oracle.grad_y_f(x, y), p, "grad_y f");
  expect_size(oracle.grad_x_g(x, y), d, "grad_x g");
  expect_size(oracle.grad_y_g(x, y), p, "grad_y g");
  if (const auto h = oracle.hess_yy_g(x, y); h && h->size() != p) {
    throw InvalidArgument("oracle: hess_yy g has the wrong size");
  }
  if (const auto j = oracle.hess_xy_g(x, y); j && (j->rows() != d || j->cols() != p)) {
    throw InvalidArgument("oracle: hess_xy g has the wrong shape");
  }
}

}  // namespace hjfbio
