#include "occopt/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <string>

#include "occopt/error.hpp"

namespace occopt {

void SystemParams::validate() const {
  if (!std::isfinite(mu) || !(mu > 0.0)) throw InputError("system: mu must be positive");
  if (!std::isfinite(gamma1) || gamma1 < 0.0) throw InputError("system: gamma1 must be >= 0");
  if (!std::isfinite(gamma2) || gamma2 < 0.0) throw InputError("system: gamma2 must be >= 0");
}

const char* to_string(ClosedFormMode mode) noexcept {
  return mode == ClosedFormMode::AsPrinted ? "as_printed" : "calibrated";
}

ClosedFormMode parse_closed_form_mode(const char* name) {
  if (std::strcmp(name, "calibrated") == 0) return ClosedFormMode::Calibrated;
  if (std::strcmp(name, "as_printed") == 0) return ClosedFormMode::AsPrinted;
  throw InputError(std::string("unknown closed-form mode '") + name + "'");
}

namespace {

using Bloch = std::array<double, 3>;  // w, Re rho12, Im rho12

Bloch bloch_rhs(const Bloch& s, double drive, double g1, double g2) {
  return {4.0 * drive * s[2] - g1 * (1.0 + s[0]), -g2 * s[1], -drive * s[0] - g2 * s[2]};
}

Bloch axpy(const Bloch& s, double a, const Bloch& k) {
  return {s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]};
}

DensityState to_state(const Bloch& s) {
  return {0.5 * (1.0 - s[0]), 0.5 * (1.0 + s[0]), std::complex<double>(s[1], s[2])};
}

}  // namespace

DensityTrajectory integrate_liouville(const SystemParams& params, const PulseGrid& pulse,
                                      std::size_t substeps) {
  params.validate();
  if (substeps == 0) throw InputError("integrate_liouville: substeps must be >= 1");

  const auto v = pulse.values();
  const TimeGrid& grid = pulse.grid();
  const double h = grid.spacing() / static_cast<double>(substeps);
  const double g1 = params.gamma1;
  const double g2 = params.gamma2;

  DensityTrajectory out{grid, {}};
  out.states.reserve(grid.size());
  Bloch s{-1.0, 0.0, 0.0};
  out.states.push_back(to_state(s));

  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double va = params.mu * v[i];
    const double vb = params.mu * v[i + 1];
    auto drive_at = [&](double frac) { return va + (vb - va) * frac; };
    for (std::size_t k = 0; k < substeps; ++k) {
      const double f0 = static_cast<double>(k) / static_cast<double>(substeps);
      const double fm = (static_cast<double>(k) + 0.5) / static_cast<double>(substeps);
      const double f1 = static_cast<double>(k + 1) / static_cast<double>(substeps);
      const double d0 = drive_at(f0), dm = drive_at(fm), d1 = drive_at(f1);
      const Bloch k1 = bloch_rhs(s, d0, g1, g2);
      const Bloch k2 = bloch_rhs(axpy(s, 0.5 * h, k1), dm, g1, g2);
      const Bloch k3 = bloch_rhs(axpy(s, 0.5 * h, k2), dm, g1, g2);
      const Bloch k4 = bloch_rhs(axpy(s, h, k3), d1, g1, g2);
      for (int c = 0; c < 3; ++c) s[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    out.states.push_back(to_state(s));
  }
  return out;
}

double steady_state_rho22(const SystemParams& params, double v0) {
  params.validate();
  const double drive2 = params.mu * params.mu * v0 * v0;
  const double denom = params.gamma1 * params.gamma2 + 4.0 * drive2;
  if (!(denom > 0.0)) {
    throw InputError("steady_state_rho22: undefined for gamma1*gamma2 + 4 (mu v0)^2 = 0");
  }
  return 2.0 * drive2 / denom;
}

double rho22_closed_form(const SystemParams& params, double theta, double t,
                         ClosedFormMode mode) {
  if (!std::isfinite(theta) || !std::isfinite(t)) {
    throw InputError("rho22_closed_form: non-finite input");
  }
  if (t < 0.0) throw InputError("rho22_closed_form: t must be >= 0");

  const double g1 = params.gamma1;
  const double g2 = params.gamma2;
  const double a = params.mu * theta;
  const double a2 = a * a;
  const double f = g1 * g2 * t * t + 4.0 * a2;
  if (f == 0.0) return 0.0;

  const double half_rate_t = 0.5 * (g1 + g2) * t;
  const double radicand = (g1 - g2) * (g1 - g2) * t * t - 16.0 * a2;
  // q = H^2, signed; negative means H is imaginary.
  const double q = mode == ClosedFormMode::Calibrated ? 0.25 * radicand : 0.5 * radicand;
  const double coef = mode == ClosedFormMode::Calibrated ? half_rate_t : 2.0 * half_rate_t;

  const double damp = std::exp(-half_rate_t);
  const double abs_h = std::sqrt(std::abs(q));
  double cosh_term;  // cosh(H) e^{-st}
  double sinhc_term;  // sinh(H)/H e^{-st}
  if (q >= 0.0) {
    cosh_term = 0.5 * (std::exp(abs_h - half_rate_t) + std::exp(-abs_h - half_rate_t));
    sinhc_term = abs_h < 1e-4
                     ? (1.0 + q / 6.0 + q * q / 120.0) * damp
                     : (std::exp(abs_h - half_rate_t) - std::exp(-abs_h - half_rate_t)) /
                           (2.0 * abs_h);
  } else {
    cosh_term = std::cos(abs_h) * damp;
    sinhc_term =
        (abs_h < 1e-4 ? 1.0 + q / 6.0 + q * q / 120.0 : std::sin(abs_h) / abs_h) * damp;
  }
  return 2.0 * a2 / f * (1.0 - cosh_term - coef * sinhc_term);
}

DensityTrajectory rho22_closed_form_trajectory(const SystemParams& params,
                                               const ThetaTrajectory& theta,
                                               ClosedFormMode mode) {
  params.validate();
  theta.validate();
  DensityTrajectory out{theta.grid, {}};
  out.states.reserve(theta.theta.size());
  for (std::size_t i = 0; i < theta.theta.size(); ++i) {
    const double r = rho22_closed_form(params, theta.theta[i], theta.grid.time(i), mode);
    out.states.push_back(DensityState::from_occupation(r));
  }
  return out;
}

double validity_metric(const SystemParams& params, const PulseGrid& pulse) {
  params.validate();
  const auto v = pulse.values();
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  if (vmax == 0.0) throw InputError("validity_metric: undefined for a zero pulse");

  const auto dv = differentiate(v, pulse.grid().spacing());
  const double gamma = std::max(params.gamma1, params.gamma2);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < 1e-12 * vmax) continue;
    worst = std::max(worst, std::abs(dv[i] / v[i]) * gamma);
  }
  return worst;
}

}  // namespace occopt
