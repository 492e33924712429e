#pragma once

#include <functional>
#include <optional>

#include "occopt/dynamics.hpp"

namespace occopt {

/// Occupation model rho22(theta, t) used as the Lagrangian density of the
/// control problem, with finite-difference theta-derivatives.
class Objective {
 public:
  using Occupation = std::function<double(double theta, double t)>;

  explicit Objective(Occupation occupation, std::optional<SystemParams> system = std::nullopt);

  /// Closed-form rho22 for the given system.
  static Objective closed_form(const SystemParams& params,
                               ClosedFormMode mode = ClosedFormMode::Calibrated);
  /// rho22 == 0: the Euler-Lagrange equation becomes linear.
  static Objective zero();

  double occupation(double theta, double t) const { return occupation_(theta, t); }

  /// d rho22 / d theta, central difference with h = 1e-6 max(1, |theta|).
  double gradient(double theta, double t) const;

  /// d^2 rho22 / d theta^2, three-point difference with h = 1e-4 max(1, |theta|).
  /// Only feeds the Newton Jacobian.
  double curvature(double theta, double t) const;

  /// Present when the objective describes a physical system (enables ODE checks).
  const std::optional<SystemParams>& system() const noexcept { return system_; }

 private:
  Occupation occupation_;
  std::optional<SystemParams> system_;
};

/// d rho22 / d theta of the closed form.
double objective_gradient(const SystemParams& params, double theta, double t,
                          ClosedFormMode mode = ClosedFormMode::Calibrated);

}  // namespace occopt
