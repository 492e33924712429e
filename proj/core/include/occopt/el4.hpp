#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occopt/dynamics.hpp"
#include "occopt/grid.hpp"
#include "occopt/objective.hpp"

namespace occopt {

/// Fourth-order Euler-Lagrange problem for the pulse area
///
///   -lambda1 theta'''' + lambda theta'' - 1/2 d rho22/d theta = 0,
///   theta(0) = theta'(0) = theta'(T) = 0,  theta(T) = theta_T,
///
/// i.e. stationarity of int [rho22 + lambda V^2 + lambda1 V'^2] dt with V = theta'.
/// Maximisation uses lambda < 0, lambda1 < 0.
struct EL4Config {
  double lambda = 0.0;
  double lambda1 = -1e-3;
  double theta_T = std::numbers::pi / 2.0;
  double duration = 1.0;
  std::size_t n = 400;  // grid intervals
  double newton_tol = 1e-9;
  int max_iter = 200;
  double damping = 1.0;  // first trial step length of each Newton line search
  std::size_t ode_substeps = kDefaultSubsteps;

  /// Throws InputError unless n >= 8, newton_tol > 0, lambda1 != 0,
  /// damping in (0, 1] and all values finite.
  void validate() const;
  TimeGrid grid() const { return TimeGrid(duration, n); }
};

enum class EL4Status { Converged, MaxIterations, LineSearchFailed, SingularJacobian };
const char* to_string(EL4Status status) noexcept;

struct EL4Solution {
  EL4Config config;
  ThetaTrajectory theta;  // dtheta holds V
  PulseGrid pulse;        // V = theta' by second-order differences
  std::vector<double> second_derivative;  // auxiliary unknown u = theta''
  double residual_norm = 0.0;
  FunctionalValues functionals;  // n2 from the objective (closed form)
  std::optional<double> n2_ode;  // n2 from the Liouville integrator, when a system is known
  int iterations = 0;
  bool converged = false;
  EL4Status status = EL4Status::MaxIterations;
  std::string message;
};

/// Throws SolverError carrying the residual norm if the solve did not converge.
const EL4Solution& require_converged(const EL4Solution& solution);

/// Residual of the discretised equation on theta alone (size n+1). Rows 0, 1,
/// n-1, n hold theta(0), theta'(0), theta'(T), theta(T) - theta_T with
/// second-order one-sided stencils; rows 2..n-2 use the 5-point theta'''' and
/// 3-point theta'' stencils, evaluated by repeated differencing.
std::vector<double> el4_residual(const EL4Config& config, const Objective& objective,
                                 const ThetaTrajectory& theta);
std::vector<double> el4_residual(const EL4Config& config, const SystemParams& params,
                                 const ThetaTrajectory& theta,
                                 ClosedFormMode mode = ClosedFormMode::Calibrated);

/// theta(0), theta'(0), theta'(T), theta(T) - theta_T with the stencils of the boundary rows.
std::array<double, 4> boundary_residuals(const EL4Config& config, const ThetaTrajectory& theta);

/// Residual of the split system the Newton solver works on, with unknowns
/// theta and u = theta'' (size 2(n+1)):
///   rows 0..n       boundary rows and the equation rows -lambda1 D2u + lambda u - g/2,
///   rows n+1..2n+1  h^2 u_i - (second difference of theta)_i, one-sided at the ends.
/// When u equals the second difference of theta the equation rows coincide with
/// el4_residual. The auxiliary rows are in theta units, which keeps the system
/// solvable to 1e-9 in double precision where the 1/h^4 stencil on theta alone is not.
std::vector<double> el4_split_residual(const EL4Config& config, const Objective& objective,
                                       std::span<const double> theta,
                                       std::span<const double> second_derivative);

/// theta_T (10 s^3 - 15 s^4 + 6 s^5), s = t / T: satisfies all four boundary conditions.
ThetaTrajectory quintic_initial_guess(const EL4Config& config);

/// Damped Newton on the split system, with sparse LU for each linear solve.
/// Each line search starts at config.damping and halves until the residual
/// decreases (Armijo); below 2^-20 the solve fails. A guess on a different grid
/// is linearly interpolated. Never throws for numerical failure: inspect
/// `converged` / `status`.
EL4Solution solve_el4(const EL4Config& config, const Objective& objective,
                      const std::optional<ThetaTrajectory>& initial_guess = std::nullopt);
EL4Solution solve_el4(const EL4Config& config, const SystemParams& params,
                      ClosedFormMode mode = ClosedFormMode::Calibrated,
                      const std::optional<ThetaTrajectory>& initial_guess = std::nullopt);

struct MatchTargets {
  double energy;     // E0
  double curvature;  // R
};

struct MatchOptions {
  double theta_T = std::numbers::pi / 2.0;
  double duration = 1.0;
  std::size_t n = 400;
  double lambda_seed = -0.01;
  double lambda1_seed = -1e-3;  // its sign is kept throughout
  /// Also solve for theta_T (minimum-norm Gauss-Newton steps on the
  /// underdetermined 2x3 system), starting from theta_T above.
  bool free_theta_T = false;
  double rel_tol = 1e-4;  // max relative mismatch of (E0, R)
  int max_outer = 60;
  double newton_tol = 1e-9;
  int newton_max_iter = 200;
};

struct MatchResult {
  double lambda = 0.0;
  double lambda1 = 0.0;
  double theta_T = 0.0;
  std::optional<EL4Solution> solution;  // best converged inner solution so far
  bool converged = false;
  int iterations = 0;
  double rel_error = 0.0;
  std::string message;
};

/// Finds multipliers (lambda, lambda1), and optionally theta_T, such that the
/// EL4 solution has the target energy and curvature. Newton steps with a
/// finite-difference Jacobian, Broyden updates in the square case, and
/// backtracking on the mismatch; each inner solve is warm-started from the
/// previous one. On failure the best-so-far result is returned unconverged.
MatchResult match_constraints(const Objective& objective, MatchTargets targets,
                              const MatchOptions& options = {});
MatchResult match_constraints(const SystemParams& params, ClosedFormMode mode,
                              MatchTargets targets, const MatchOptions& options = {});

/// Fixed-multiplier solutions over a list of boundary areas theta_T, each warm-started
/// from the previous (rescaled). Entries that fail are kept with converged = false.
std::vector<EL4Solution> scan_theta_T(const EL4Config& base, const Objective& objective,
                                      std::span<const double> theta_T_values);

}  // namespace occopt
