#include "occopt/el2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "occopt/error.hpp"

namespace occopt {

void EL2Config::validate() const {
  if (!(C > 0.0 && C <= 1.0)) {
    throw InputError("el2: C must lie in (0, 1], got " + std::to_string(C));
  }
  if (!std::isfinite(duration) || !(duration > 0.0)) throw InputError("el2: duration must be > 0");
  if (n < 4) throw InputError("el2: need at least 4 grid intervals");
  if (!(inversion_gap > 0.0 && inversion_gap < 1e-6)) {
    throw InputError("el2: inversion_gap must lie in (0, 1e-6)");
  }
}

EL2Solution solve_el2(const EL2Config& config) {
  config.validate();
  const EllipticParameter m(config.C);
  const TimeGrid grid = config.grid();

  double v0 = 0.0;
  if (m.degenerate()) {
    // gd(x) = pi/2 - gap  <=>  x = asinh(cot(gap)).
    v0 = std::asinh(1.0 / std::tan(config.inversion_gap)) / config.duration;
  } else {
    v0 = elliptic_K(m) / config.duration;
  }

  std::vector<double> v(grid.size());
  std::vector<double> th(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const JacobiValues j = jacobi_am_dn_sn_cn(v0 * (grid.time(i) - grid.start()), m);
    v[i] = v0 * j.dn;
    th[i] = j.am;
  }

  const double lambda_prime = -1.0 / (config.C * v0 * v0);
  ThetaTrajectory theta{grid, std::move(th), v};
  const std::vector<double> r = pendulum_residual(theta, lambda_prime);
  double norm = 0.0;
  for (double x : r) norm = std::max(norm, std::abs(x));

  return EL2Solution{config, PulseGrid(grid, std::move(v)), std::move(theta), v0, lambda_prime, norm};
}

std::vector<double> pendulum_residual(const ThetaTrajectory& theta, double lambda_prime) {
  theta.validate();
  if (lambda_prime == 0.0 || !std::isfinite(lambda_prime)) {
    throw InputError("pendulum_residual: lambda' must be finite and nonzero");
  }
  const std::size_t n = theta.grid.intervals();
  if (n < 4) throw InputError("pendulum_residual: need at least 4 grid intervals");
  const double h = theta.grid.spacing();
  const auto& th = theta.theta;
  std::vector<double> r(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double d2 = ((th[i + 1] - th[i]) - (th[i] - th[i - 1])) / (h * h);
    r[i - 1] = 2.0 * lambda_prime * d2 - std::sin(2.0 * th[i]);
  }
  return r;
}

DensityTrajectory decoherence_free_occupation(const ThetaTrajectory& theta) {
  theta.validate();
  DensityTrajectory out{theta.grid, {}};
  out.states.reserve(theta.theta.size());
  for (double x : theta.theta) {
    const double s = std::sin(x);
    out.states.push_back(DensityState::from_occupation(s * s));
  }
  return out;
}

}  // namespace occopt
