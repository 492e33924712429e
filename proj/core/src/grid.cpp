#include "occopt/grid.hpp"

#include <cmath>
#include <string>

#include "occopt/error.hpp"

namespace occopt {

TimeGrid::TimeGrid(double t0, double duration, std::size_t intervals)
    : t0_(t0), duration_(duration), n_(intervals) {
  if (!std::isfinite(t0) || !std::isfinite(duration) || !(duration > 0.0)) {
    throw InputError("time grid: duration must be finite and positive");
  }
  if (intervals < 2) {
    throw InputError("time grid: need at least 2 intervals, got " + std::to_string(intervals));
  }
}

double TimeGrid::time(std::size_t i) const noexcept {
  if (i == n_) return t0_ + duration_;
  return t0_ + duration_ * (static_cast<double>(i) / static_cast<double>(n_));
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = time(i);
  return t;
}

PulseGrid::PulseGrid(TimeGrid grid, std::vector<double> samples)
    : grid_(grid), v_(std::move(samples)) {
  if (v_.size() != grid_.size()) {
    throw InputError("pulse: " + std::to_string(v_.size()) + " samples for a grid of " +
                     std::to_string(grid_.size()) + " nodes");
  }
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (!std::isfinite(v_[i])) {
      throw InputError("pulse: non-finite sample at node " + std::to_string(i));
    }
  }
}

PulseGrid PulseGrid::reversed() const {
  return PulseGrid(grid_, std::vector<double>(v_.rbegin(), v_.rend()));
}

void ThetaTrajectory::validate() const {
  if (theta.size() != grid.size()) throw InputError("theta trajectory: size mismatch");
  if (dtheta && dtheta->size() != grid.size()) {
    throw InputError("theta trajectory: derivative size mismatch");
  }
  for (double x : theta) {
    if (!std::isfinite(x)) throw InputError("theta trajectory: non-finite value");
  }
}

double trapezoid(std::span<const double> y, double h) {
  if (y.size() < 2) return 0.0;
  double interior = 0.0;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) interior += y[i];
  return h * (interior + 0.5 * (y.front() + y.back()));
}

std::vector<double> differentiate(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 3) throw InputError("differentiate: need at least 3 samples");
  std::vector<double> d(n);
  const double inv2h = 0.5 / h;
  d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) * inv2h;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) * inv2h;
  d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) * inv2h;
  return d;
}

}  // namespace occopt
