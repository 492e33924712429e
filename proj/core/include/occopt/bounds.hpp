#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occopt/dynamics.hpp"
#include "occopt/grid.hpp"

namespace occopt {

/// Absolute ceiling of the upper-level occupation, (1 + exp(-(g1 + g2) t / 2)) / 2.
/// Throws InputError for t < 0.
double rho22_upper_bound(double t, const SystemParams& params);

/// T/2 + (1 - exp(-(g1 + g2) T / 2)) / (g1 + g2), the integral of rho22_upper_bound
/// over [0, T]. A series is used when (g1 + g2) T < 1e-8.
double n2_upper_bound(double duration, const SystemParams& params);

/// (g1 + g2) / 2.
double effective_decay(const SystemParams& params);
/// 2 / (g1 + g2); +infinity without relaxation.
double lifetime_bound(const SystemParams& params);

/// A node satisfies the strong-field condition when max(g1, g2) t / theta(t) is below this.
inline constexpr double kStrongFieldThreshold = 0.2;
inline constexpr double kViolationTolerance = 1e-9;

struct EnsembleConfig {
  std::size_t count = 40;
  std::uint64_t seed = 1;
  std::size_t modes = 6;
  double amplitude_scale = 10.0;  // time-averaged |V| of every pulse

  /// Throws InputError unless count >= 1, modes >= 1 and amplitude_scale > 0 (finite).
  void validate() const;
};

/// Name of the coefficient generator, recorded in reports.
inline constexpr const char* kEnsembleGenerator = "mt19937_64 top-53-bit uniform [-1,1)";

/// Rectified random sine sums |sum_k a_k sin(k pi (t - t0) / T)|, k = 1..modes,
/// with a_k uniform in [-1, 1), each rescaled so that its time average equals
/// amplitude_scale. Deterministic for a fixed seed on every platform.
std::vector<PulseGrid> random_pulse_ensemble(const EnsembleConfig& config, const TimeGrid& grid);

/// Fraction of nodes with t > t0 at which max(g1, g2) (t - t0) / theta(t) < kStrongFieldThreshold.
double strong_field_fraction(const SystemParams& params, const PulseGrid& pulse);

struct BoundRow {
  std::size_t pulse_id = 0;
  double n2 = 0.0;
  double n2_bound = 0.0;
  /// max over nodes of rho22(t) - rho22_upper_bound(t); negative when the pulse stays below.
  double max_excess = 0.0;
  std::size_t violating_nodes = 0;  // nodes with excess > kViolationTolerance
  double condition_fraction = 0.0;
  /// Same excess for the closed-form occupation along the pulse area (informational).
  double closed_form_max_excess = 0.0;
  std::optional<std::string> error;  // set when the pulse could not be evaluated
};

struct BoundReport {
  SystemParams params;
  std::vector<BoundRow> rows;
  std::size_t violating_pulses = 0;  // pulses with at least one violating node
  std::size_t violating_nodes = 0;
  std::size_t n2_violations = 0;  // pulses with n2 > n2_bound + kViolationTolerance
  std::size_t failed_pulses = 0;
  double max_excess = 0.0;  // over all evaluated pulses; 0 for an empty report
  double condition_fraction = 0.0;  // mean over evaluated pulses

  bool has_violation() const noexcept { return violating_nodes > 0 || n2_violations > 0; }
};

/// Integrates one pulse and compares it with the bounds. Evaluation errors are
/// stored in the row rather than thrown.
BoundRow check_pulse(const SystemParams& params, const PulseGrid& pulse, std::size_t pulse_id,
                     std::size_t substeps = kDefaultSubsteps);

/// Reduction of per-pulse rows into a report; rows are kept in the given order.
BoundReport assemble_report(const SystemParams& params, std::vector<BoundRow> rows);

BoundReport bound_check(const SystemParams& params, std::span<const PulseGrid> pulses,
                        std::size_t substeps = kDefaultSubsteps);

}  // namespace occopt
