#include "occopt/functionals.hpp"

#include "occopt/error.hpp"

namespace occopt {

ThetaTrajectory cumulative_area(const PulseGrid& pulse) {
  const auto v = pulse.values();
  const double h = pulse.grid().spacing();
  std::vector<double> theta(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) {
    theta[i] = theta[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
  }
  return {pulse.grid(), std::move(theta), std::vector<double>(v.begin(), v.end())};
}

double pulse_energy(const PulseGrid& pulse) {
  const auto v = pulse.values();
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
  return trapezoid(sq, pulse.grid().spacing());
}

double pulse_curvature(const PulseGrid& pulse) {
  const double h = pulse.grid().spacing();
  auto dv = differentiate(pulse.values(), h);
  for (double& x : dv) x *= x;
  return trapezoid(dv, h);
}

double width_functional(const ThetaTrajectory& theta) {
  theta.validate();
  const double h = theta.grid.spacing();
  const std::vector<double> rate = theta.dtheta ? *theta.dtheta : differentiate(theta.theta, h);

  // Trapezoid weights sum to T, so this is T times a weighted variance.
  const std::size_t n = rate.size();
  auto weight = [&](std::size_t i) { return (i == 0 || i + 1 == n) ? 0.5 * h : h; };
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += weight(i) * rate[i];
  const double mean = total / theta.grid.duration();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = rate[i] - mean;
    acc += weight(i) * d * d;
  }
  return acc;
}

double average_occupation(const DensityTrajectory& traj) {
  if (traj.states.size() != traj.grid.size()) {
    throw InputError("average_occupation: trajectory size does not match its grid");
  }
  return trapezoid(traj.rho22(), traj.grid.spacing());
}

}  // namespace occopt
