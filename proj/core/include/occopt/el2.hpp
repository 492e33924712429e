#pragma once

#include <cstddef>
#include <vector>

#include "occopt/density.hpp"
#include "occopt/elliptic.hpp"
#include "occopt/grid.hpp"

namespace occopt {

/// Decoherence-free limit: the pendulum equation 2 lambda' theta'' - sin(2 theta) = 0
/// with theta(0) = 0, theta(T) = pi/2, solved by V = V0 dn(V0 t, C), theta = am(V0 t, C).
struct EL2Config {
  double C = 0.5;  // integration constant, an elliptic parameter in (0, 1]
  double duration = 1.0;
  std::size_t n = 400;
  /// Only for C = 1 (sech branch), where theta(T) = pi/2 is reached only
  /// asymptotically: V0 is chosen so that theta(T) = pi/2 - inversion_gap.
  double inversion_gap = 5e-11;

  /// Throws InputError unless 0 < C <= 1, duration > 0, n >= 4 and
  /// 0 < inversion_gap < 1e-6.
  void validate() const;
  TimeGrid grid() const { return TimeGrid(duration, n); }
};

struct EL2Solution {
  EL2Config config;
  PulseGrid pulse;
  ThetaTrajectory theta;  // dtheta holds V
  double v0 = 0.0;
  double lambda_prime = 0.0;  // -1 / (C V0^2), always negative
  double residual_norm = 0.0;  // max interior pendulum residual
};

/// V0 = K(C) / T, so theta(T) = am(K(C), C) = pi/2. Parameters within the
/// degenerate gap of 1 use V0 sech(V0 t) and theta = gd(V0 t).
EL2Solution solve_el2(const EL2Config& config);

/// 2 lambda' theta''_i - sin(2 theta_i) at the interior nodes i = 1..n-1
/// (three-point theta''). Throws InputError for lambda' = 0 or fewer than 4 intervals.
std::vector<double> pendulum_residual(const ThetaTrajectory& theta, double lambda_prime);

/// rho22 = sin^2(theta) node-wise (no coherence stored).
DensityTrajectory decoherence_free_occupation(const ThetaTrajectory& theta);

}  // namespace occopt
