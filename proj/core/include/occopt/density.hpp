#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "occopt/grid.hpp"

namespace occopt {

/// Two-level density matrix in the rotating frame. rho21 = conj(rho12) is implied.
/// The coherence is absent for occupation-only trajectories (closed-form evaluation).
struct DensityState {
  double rho11 = 1.0;
  double rho22 = 0.0;
  std::optional<std::complex<double>> rho12;

  static DensityState ground() { return {1.0, 0.0, std::complex<double>{}}; }
  static DensityState from_occupation(double rho22) { return {1.0 - rho22, rho22, std::nullopt}; }
};

struct DensityTrajectory {
  TimeGrid grid;
  std::vector<DensityState> states;

  std::vector<double> rho22() const {
    std::vector<double> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) out[i] = states[i].rho22;
    return out;
  }
};

}  // namespace occopt
