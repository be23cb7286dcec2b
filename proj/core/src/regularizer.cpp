#include "hjfbio/regularizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "hjfbio/errors.hpp"

namespace hjfbio {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, sep)) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw InvalidArgument("regularizer: cannot parse number '" + text + "'");
  }
  return value;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

Regularizer Regularizer::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) {
    throw InvalidArgument("Regularizer::box: bound dimensions differ");
  }
  for (Index i = 0; i < lo.size(); ++i) {
    if (!(lo(i) <= hi(i))) {
      throw InvalidArgument("Regularizer::box: requires lo <= hi elementwise");
    }
  }
  return Regularizer(Box{std::move(lo), std::move(hi)});
}

Regularizer Regularizer::box(Index dim, double lo, double hi) {
  return box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

Regularizer Regularizer::l1(double weight) {
  if (!(weight >= 0.0)) {
    throw InvalidArgument("Regularizer::l1: weight must be nonnegative");
  }
  return Regularizer(L1{weight});
}

double Regularizer::value(const Vector& x) const {
  return std::visit(overloaded{
                        [](const Zero&) { return 0.0; },
                        [&](const Box& b) {
                          for (Index i = 0; i < x.size(); ++i) {
                            if (x(i) < b.lo(i) || x(i) > b.hi(i)) {
                              return std::numeric_limits<double>::infinity();
                            }
                          }
                          return 0.0;
                        },
                        [&](const L1& l) { return l.weight * x.lpNorm<1>(); },
                    },
                    variant_);
}

Vector Regularizer::prox(double gamma, const Vector& x) const {
  return std::visit(overloaded{
                        [&](const Zero&) -> Vector { return x; },
                        [&](const Box& b) -> Vector {
                          if (b.lo.size() != x.size()) {
                            throw InvalidArgument("Regularizer::prox: box dimension mismatch");
                          }
                          return x.cwiseMax(b.lo).cwiseMin(b.hi);
                        },
                        [&](const L1& l) -> Vector {
                          // Soft threshold; |x_i| == threshold maps to exactly 0.
                          const double threshold = gamma * l.weight;
                          Vector out(x.size());
                          for (Index i = 0; i < x.size(); ++i) {
                            const double mag = std::abs(x(i)) - threshold;
                            out(i) = mag > 0.0 ? std::copysign(mag, x(i)) : 0.0;
                          }
                          return out;
                        },
                    },
                    variant_);
}

std::string Regularizer::describe() const {
  return std::visit(overloaded{
                        [](const Zero&) { return std::string("zero"); },
                        [](const Box& b) {
                          if (b.lo.size() > 0 && (b.lo.array() == b.lo(0)).all() &&
                              (b.hi.array() == b.hi(0)).all()) {
                            return "box:" + format_double(b.lo(0)) + ":" + format_double(b.hi(0));
                          }
                          std::string out = "box";
                          for (Index i = 0; i < b.lo.size(); ++i) {
                            out += ":" + format_double(b.lo(i)) + ":" + format_double(b.hi(i));
                          }
                          return out;
                        },
                        [](const L1& l) { return "l1:" + format_double(l.weight); },
                    },
                    variant_);
}

Regularizer Regularizer::parse(const std::string& text, Index dim) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw InvalidArgument("regularizer: empty specification");
  const std::string& kind = parts[0];
  if (kind == "zero" && parts.size() == 1) return zero();
  if (kind == "l1" && parts.size() == 2) return l1(parse_double(parts[1]));
  if (kind == "box" && parts.size() == 3) {
    return box(dim, parse_double(parts[1]), parse_double(parts[2]));
  }
  if (kind == "box" && parts.size() == static_cast<std::size_t>(1 + 2 * dim)) {
    Vector lo(dim), hi(dim);
    for (Index i = 0; i < dim; ++i) {
      lo(i) = parse_double(parts[static_cast<std::size_t>(1 + 2 * i)]);
      hi(i) = parse_double(parts[static_cast<std::size_t>(2 + 2 * i)]);
    }
    return box(std::move(lo), std::move(hi));
  }
  throw InvalidArgument("regularizer: cannot parse '" + text +
                        "' (expected zero, box:<lo>:<hi> or l1:<weight>)");
}

Vector prox_step(const Vector& x, const Vector& w, double gamma, const Regularizer& reg) {
  if (x.size() != w.size()) throw InvalidArgument("prox_step: dimension mismatch");
  return reg.prox(gamma, x - gamma * w);
}

Vector gradient_mapping(const Vector& x, const Vector& grad, double gamma, const Regularizer& reg) {
  return (x - prox_step(x, grad, gamma, reg)) / gamma;
}

}  // namespace hjfbio
