#include "occopt/elliptic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "occopt/error.hpp"

namespace occopt {

namespace {

constexpr int kMaxAgmSteps = 32;
constexpr double kAgmTolerance = 1e-15;

}  // namespace

EllipticParameter::EllipticParameter(double m) : m_(m) {
  if (!(m >= 0.0 && m <= 1.0)) {
    throw InputError("elliptic parameter must lie in [0, 1], got " + std::to_string(m));
  }
}

double elliptic_K(EllipticParameter m) {
  if (m.value() >= 1.0) throw InputError("elliptic_K: diverges at m = 1");
  double a = 1.0;
  double b = std::sqrt(m.complement());
  for (int i = 0; i < kMaxAgmSteps && std::abs(a - b) > kAgmTolerance * a; ++i) {
    const double next = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next;
  }
  return std::numbers::pi / (a + b);
}

JacobiValues jacobi_am_dn_sn_cn(double u, EllipticParameter m) {
  if (!std::isfinite(u)) throw InputError("jacobi: argument must be finite");

  if (m.value() == 0.0) return {u, 1.0, std::sin(u), std::cos(u)};
  if (m.degenerate()) {
    const double sech = 1.0 / std::cosh(u);
    return {2.0 * std::atan(std::tanh(0.5 * u)), sech, std::tanh(u), sech};
  }

  // a_n, c_n of the AGM sequence; index 0 is (1, sqrt(m)).
  std::array<double, kMaxAgmSteps + 1> a{};
  std::array<double, kMaxAgmSteps + 1> c{};
  a[0] = 1.0;
  c[0] = std::sqrt(m.value());
  double b = std::sqrt(m.complement());
  int steps = 0;
  while (steps < kMaxAgmSteps && std::abs(c[steps]) > kAgmTolerance * a[steps]) {
    const double an = a[steps];
    a[steps + 1] = 0.5 * (an + b);
    c[steps + 1] = 0.5 * (an - b);
    b = std::sqrt(an * b);
    ++steps;
  }

  double phi = std::ldexp(a[steps] * u, steps);
  for (int n = steps; n > 0; --n) {
    phi = 0.5 * (phi + std::asin(c[n] / a[n] * std::sin(phi)));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // 1 - m sn^2 written without cancellation near m -> 1.
  const double dn = std::sqrt(cn * cn + m.complement() * sn * sn);
  return {phi, dn, sn, cn};
}

}  // namespace occopt
