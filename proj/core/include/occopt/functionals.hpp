#pragma once

#include "occopt/density.hpp"
#include "occopt/grid.hpp"

namespace occopt {

/// theta(t_i) = cumulative trapezoid integral of V from t0; theta(t0) = 0.
/// The returned trajectory carries V as its derivative.
ThetaTrajectory cumulative_area(const PulseGrid& pulse);

/// int V^2 dt.
double pulse_energy(const PulseGrid& pulse);

/// int (dV/dt)^2 dt with dV/dt from second-order finite differences.
double pulse_curvature(const PulseGrid& pulse);

/// int thetadot^2 - (1/T)(int thetadot)^2, evaluated as a trapezoid-weighted
/// variance so it is never negative. Uses theta.dtheta when present, finite
/// differences of theta otherwise.
double width_functional(const ThetaTrajectory& theta);

/// n2 = int rho22 dt.
double average_occupation(const DensityTrajectory& traj);

}  // namespace occopt
