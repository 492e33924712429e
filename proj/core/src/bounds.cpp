#include "occopt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "occopt/error.hpp"
#include "occopt/functionals.hpp"

namespace occopt {

double rho22_upper_bound(double t, const SystemParams& params) {
  params.validate();
  if (!(t >= 0.0)) throw InputError("rho22_upper_bound: t must be >= 0");
  return 0.5 * (1.0 + std::exp(-0.5 * params.total_rate() * t));
}

double n2_upper_bound(double duration, const SystemParams& params) {
  params.validate();
  if (!std::isfinite(duration) || !(duration > 0.0)) {
    throw InputError("n2_upper_bound: duration must be > 0");
  }
  const double g = params.total_rate();
  const double x = 0.5 * g * duration;
  if (g * duration < 1e-8) {
    // (1 - e^-x) / g = (T/2) (1 - x/2 + x^2/6 - ...)
    return 0.5 * duration + 0.5 * duration * (1.0 - x / 2.0 + x * x / 6.0);
  }
  return 0.5 * duration - std::expm1(-x) / g;
}

double effective_decay(const SystemParams& params) {
  params.validate();
  return 0.5 * params.total_rate();
}

double lifetime_bound(const SystemParams& params) {
  params.validate();
  const double g = params.total_rate();
  return g > 0.0 ? 2.0 / g : std::numeric_limits<double>::infinity();
}

void EnsembleConfig::validate() const {
  if (count < 1) throw InputError("ensemble: count must be >= 1");
  if (modes < 1) throw InputError("ensemble: modes must be >= 1");
  if (!std::isfinite(amplitude_scale) || !(amplitude_scale > 0.0)) {
    throw InputError("ensemble: amplitude_scale must be > 0");
  }
}

namespace {

// Uniform in [-1, 1) from the top 53 bits, independent of the standard library's distributions.
double uniform_signed(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -52) - 1.0;
}

}  // namespace

std::vector<PulseGrid> random_pulse_ensemble(const EnsembleConfig& config, const TimeGrid& grid) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::vector<PulseGrid> out;
  out.reserve(config.count);
  std::vector<double> a(config.modes);
  for (std::size_t p = 0; p < config.count; ++p) {
    std::vector<double> v;
    double mean = 0.0;
    // A draw whose sum vanishes on the whole grid cannot be rescaled; draw again.
    do {
      for (double& c : a) c = uniform_signed(rng);
      v.assign(grid.size(), 0.0);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = (grid.time(i) - grid.start()) / grid.duration();
        double sum = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
          sum += a[k] * std::sin(static_cast<double>(k + 1) * std::numbers::pi * s);
        }
        v[i] = std::abs(sum);
      }
      mean = trapezoid(v, grid.spacing()) / grid.duration();
    } while (!(mean > 0.0));
    const double scale = config.amplitude_scale / mean;
    for (double& x : v) x *= scale;
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

double strong_field_fraction(const SystemParams& params, const PulseGrid& pulse) {
  params.validate();
  const ThetaTrajectory theta = cumulative_area(pulse);
  const double g = std::max(params.gamma1, params.gamma2);
  const TimeGrid& grid = pulse.grid();
  std::size_t ok = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t = grid.time(i) - grid.start();
    if (g == 0.0) {
      ++ok;
    } else if (theta.theta[i] > 0.0 && g * t / theta.theta[i] < kStrongFieldThreshold) {
      ++ok;
    }
  }
  return static_cast<double>(ok) / static_cast<double>(grid.size() - 1);
}

BoundRow check_pulse(const SystemParams& params, const PulseGrid& pulse, std::size_t pulse_id,
                     std::size_t substeps) {
  BoundRow row;
  row.pulse_id = pulse_id;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const TimeGrid& grid = pulse.grid();
    const DensityTrajectory traj = integrate_liouville(params, pulse, substeps);
    row.n2 = average_occupation(traj);
    row.n2_bound = n2_upper_bound(grid.duration(), params);
    row.max_excess = -std::numeric_limits<double>::infinity();
    const ThetaTrajectory theta = cumulative_area(pulse);
    row.closed_form_max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = grid.time(i) - grid.start();
      const double cap = rho22_upper_bound(t, params);
      const double excess = traj.states[i].rho22 - cap;
      if (!std::isfinite(excess)) throw SolverError("non-finite occupation", excess, 0);
      row.max_excess = std::max(row.max_excess, excess);
      if (excess > kViolationTolerance) ++row.violating_nodes;
      const double cf = rho22_closed_form(params, theta.theta[i], t);
      row.closed_form_max_excess = std::max(row.closed_form_max_excess, cf - cap);
    }
    row.condition_fraction = strong_field_fraction(params, pulse);
  } catch (const std::exception& e) {
    row.n2 = row.n2_bound = row.max_excess = row.closed_form_max_excess = nan;
    row.condition_fraction = nan;
    row.violating_nodes = 0;
    row.error = e.what();
  }
  return row;
}

BoundReport assemble_report(const SystemParams& params, std::vector<BoundRow> rows) {
  BoundReport report{params, std::move(rows)};
  double weighted = 0.0;
  std::size_t evaluated = 0;
  bool any = false;
  for (const BoundRow& r : report.rows) {
    if (r.error) {
      ++report.failed_pulses;
      continue;
    }
    report.max_excess = any ? std::max(report.max_excess, r.max_excess) : r.max_excess;
    any = true;
    if (r.violating_nodes > 0) ++report.violating_pulses;
    report.violating_nodes += r.violating_nodes;
    if (r.n2 > r.n2_bound + kViolationTolerance) ++report.n2_violations;
    weighted += r.condition_fraction;
    ++evaluated;
  }
  report.condition_fraction = evaluated > 0 ? weighted / static_cast<double>(evaluated) : 0.0;
  return report;
}

BoundReport bound_check(const SystemParams& params, std::span<const PulseGrid> pulses,
                        std::size_t substeps) {
  params.validate();
  std::vector<BoundRow> rows;
  rows.reserve(pulses.size());
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    rows.push_back(check_pulse(params, pulses[i], i, substeps));
  }
  return assemble_report(params, std::move(rows));
}

}  // namespace occopt
