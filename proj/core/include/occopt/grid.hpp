#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace occopt {

/// Uniform time grid with n intervals on [t0, t0 + T].
class TimeGrid {
 public:
  /// Throws InputError unless T > 0, n >= 2 and both ends are finite.
  TimeGrid(double t0, double duration, std::size_t intervals);
  TimeGrid(double duration, std::size_t intervals) : TimeGrid(0.0, duration, intervals) {}

  double start() const noexcept { return t0_; }
  double duration() const noexcept { return duration_; }
  double end() const noexcept { return t0_ + duration_; }
  std::size_t intervals() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_ + 1; }
  double spacing() const noexcept { return duration_ / static_cast<double>(n_); }

  /// Node time t_i; the last node is exactly end().
  double time(std::size_t i) const noexcept;
  std::vector<double> times() const;

  /// Same interval, n intervals replaced.
  TimeGrid refined(std::size_t intervals) const { return TimeGrid(t0_, duration_, intervals); }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t0_;
  double duration_;
  std::size_t n_;
};

/// Field envelope V(t_i) sampled on a uniform grid.
class PulseGrid {
 public:
  /// Throws InputError if the sample count differs from the grid node count or
  /// any sample is non-finite.
  PulseGrid(TimeGrid grid, std::vector<double> samples);

  /// Samples f(t_i) at every node.
  template <typename F>
  static PulseGrid sample(const TimeGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.time(i));
    return PulseGrid(grid, std::move(v));
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return v_; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }
  std::size_t size() const noexcept { return v_.size(); }

  /// Samples in reverse time order on the same grid.
  PulseGrid reversed() const;

 private:
  TimeGrid grid_;
  std::vector<double> v_;
};

/// Pulse area theta(t) = integral of V, optionally with its derivative V itself.
struct ThetaTrajectory {
  TimeGrid grid;
  std::vector<double> theta;
  std::optional<std::vector<double>> dtheta;

  /// Throws InputError on size mismatch or non-finite values.
  void validate() const;
};

/// Integral functionals of a control pulse and its induced occupation.
struct FunctionalValues {
  double energy = 0.0;     // E0 = int V^2
  double curvature = 0.0;  // R = int (dV/dt)^2
  double width = 0.0;      // int V^2 - (int V)^2 / T
  double n2 = 0.0;         // int rho22
};

/// Composite trapezoid rule on a uniform grid with spacing h.
double trapezoid(std::span<const double> y, double h);

/// First derivative: second-order central differences in the interior,
/// second-order one-sided differences at both ends. Needs at least 3 samples.
std::vector<double> differentiate(std::span<const double> y, double h);

}  // namespace occopt
