#pragma once

#include <cstddef>

#include "occopt/density.hpp"
#include "occopt/grid.hpp"

namespace occopt {

/// Resonantly driven two-level system: dipole element and relaxation rates
/// (atomic units). Level energies and the carrier are absorbed by the RWA.
struct SystemParams {
  double mu = 1.0;
  double gamma1 = 0.0;  // longitudinal (population) relaxation
  double gamma2 = 0.0;  // transverse (coherence) relaxation

  /// Throws InputError unless mu > 0 and both rates are finite and >= 0.
  void validate() const;
  double total_rate() const noexcept { return gamma1 + gamma2; }
};

/// Variant of the closed-form occupation.
///   AsPrinted:  H = sqrt(X / 2),  sinh coefficient (g1 + g2) t
///   Calibrated: H = sqrt(X) / 2,  sinh coefficient (g1 + g2) t / 2
/// with X = (g1 - g2)^2 t^2 - 16 (mu theta)^2. Calibrated reproduces the exact
/// constant-field solution; AsPrinted is the literal printed expression.
enum class ClosedFormMode { AsPrinted, Calibrated };

const char* to_string(ClosedFormMode mode) noexcept;
/// Accepts "calibrated" and "as_printed". Throws InputError otherwise.
ClosedFormMode parse_closed_form_mode(const char* name);

inline constexpr std::size_t kDefaultSubsteps = 10;

/// Fixed-step RK4 on the real Bloch variables (w = rho22 - rho11, Re rho12,
/// Im rho12), starting from the ground state. V is linearly interpolated
/// between nodes and each grid interval is split into `substeps` RK4 steps.
///
///   dw/dt     = 4 mu V Im(rho12) - g1 (1 + w)
///   dRe/dt    = -g2 Re(rho12)
///   dIm/dt    = -mu V w - g2 Im(rho12)
///
/// The coupling sign gives rho22 = sin^2(mu theta) for g1 = g2 = 0.
DensityTrajectory integrate_liouville(const SystemParams& params, const PulseGrid& pulse,
                                      std::size_t substeps = kDefaultSubsteps);

/// Constant-field fixed point 2 (mu v0)^2 / (g1 g2 + 4 (mu v0)^2).
double steady_state_rho22(const SystemParams& params, double v0);

/// Closed-form rho22(theta, t). Analytic continuation is used when the radicand
/// is negative (cosh -> cos, sinh(H)/H -> sin|H|/|H|). Returns 0 when
/// g1 g2 t^2 + 4 (mu theta)^2 vanishes.
double rho22_closed_form(const SystemParams& params, double theta, double t,
                         ClosedFormMode mode = ClosedFormMode::Calibrated);

/// Node-wise closed form along theta(t); coherences are left unset.
DensityTrajectory rho22_closed_form_trajectory(const SystemParams& params,
                                               const ThetaTrajectory& theta,
                                               ClosedFormMode mode = ClosedFormMode::Calibrated);

/// max over nodes and l in {1,2} of |d ln V / dt| * gamma_l. Nodes with
/// |V| < 1e-12 max|V| are skipped. Throws InputError for an all-zero pulse.
double validity_metric(const SystemParams& params, const PulseGrid& pulse);

}  // namespace occopt
