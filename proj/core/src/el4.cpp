#include "occopt/el4.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "occopt/error.hpp"
#include "occopt/functionals.hpp"

namespace occopt {

void EL4Config::validate() const {
  if (n < 8) throw InputError("el4: need at least 8 grid intervals");
  if (!std::isfinite(lambda) || !std::isfinite(lambda1) || !std::isfinite(theta_T)) {
    throw InputError("el4: multipliers and theta_T must be finite");
  }
  if (lambda1 == 0.0) throw InputError("el4: lambda1 must be nonzero");
  if (!std::isfinite(duration) || !(duration > 0.0)) throw InputError("el4: duration must be > 0");
  if (!(newton_tol > 0.0)) throw InputError("el4: newton_tol must be > 0");
  if (max_iter < 1) throw InputError("el4: max_iter must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw InputError("el4: damping must lie in (0, 1]");
  if (ode_substeps == 0) throw InputError("el4: ode_substeps must be >= 1");
}

const char* to_string(EL4Status status) noexcept {
  switch (status) {
    case EL4Status::Converged: return "converged";
    case EL4Status::MaxIterations: return "max_iterations";
    case EL4Status::LineSearchFailed: return "line_search_failed";
    case EL4Status::SingularJacobian: return "singular_jacobian";
  }
  return "unknown";
}

const EL4Solution& require_converged(const EL4Solution& solution) {
  if (!solution.converged) {
    throw SolverError("el4 solve failed (" + std::string(to_string(solution.status)) +
                          "): " + solution.message,
                      solution.residual_norm, solution.iterations);
  }
  return solution;
}

namespace {

double max_abs(std::span<const double> r) {
  double m = 0.0;
  for (double x : r) m = std::max(m, std::abs(x));
  return m;
}

double l2(std::span<const double> r) {
  double s = 0.0;
  for (double x : r) s += x * x;
  return std::sqrt(s);
}

// Second difference of theta at node i (unscaled), one-sided at the ends.
double second_difference(std::span<const double> th, std::size_t i) {
  const std::size_t n = th.size() - 1;
  if (i == 0) return 2.0 * th[0] - 5.0 * th[1] + 4.0 * th[2] - th[3];
  if (i == n) return 2.0 * th[n] - 5.0 * th[n - 1] + 4.0 * th[n - 2] - th[n - 3];
  return (th[i + 1] - th[i]) - (th[i] - th[i - 1]);
}

void boundary_rows(const EL4Config& config, std::span<const double> th, double h,
                   std::span<double> r) {
  const std::size_t n = th.size() - 1;
  r[0] = th[0];
  r[1] = (-3.0 * th[0] + 4.0 * th[1] - th[2]) / (2.0 * h);
  r[n - 1] = (3.0 * th[n] - 4.0 * th[n - 1] + th[n - 2]) / (2.0 * h);
  r[n] = th[n] - config.theta_T;
}

std::vector<double> interpolate_onto(const ThetaTrajectory& guess, const TimeGrid& grid) {
  if (guess.grid == grid) return guess.theta;
  std::vector<double> out(grid.size());
  const TimeGrid& g = guess.grid;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = (grid.time(i) - g.start()) / g.spacing();
    const double clamped = std::clamp(x, 0.0, static_cast<double>(g.intervals()));
    const auto k = std::min(static_cast<std::size_t>(clamped), g.intervals() - 1);
    const double frac = clamped - static_cast<double>(k);
    out[i] = guess.theta[k] + frac * (guess.theta[k + 1] - guess.theta[k]);
  }
  return out;
}

class SplitSystem {
 public:
  SplitSystem(const EL4Config& config, const Objective& objective)
      : config_(config),
        objective_(objective),
        n_(config.n),
        h_(config.duration / static_cast<double>(config.n)),
        grid_(config.grid()) {}

  std::size_t unknowns() const { return 2 * (n_ + 1); }

  std::vector<double> residual(std::span<const double> z) const {
    const auto th = z.subspan(0, n_ + 1);
    const auto u = z.subspan(n_ + 1, n_ + 1);
    std::vector<double> r(unknowns());
    boundary_rows(config_, th, h_, r);
    const double h2 = h_ * h_;
    for (std::size_t i = 2; i + 2 <= n_; ++i) {
      const double d2u = ((u[i + 1] - u[i]) - (u[i] - u[i - 1])) / h2;
      r[i] = -config_.lambda1 * d2u + config_.lambda * u[i] -
             0.5 * objective_.gradient(th[i], grid_.time(i));
    }
    for (std::size_t i = 0; i <= n_; ++i) {
      r[n_ + 1 + i] = h2 * u[i] - second_difference(th, i);
    }
    return r;
  }

  Eigen::SparseMatrix<double> jacobian(std::span<const double> z) const {
    const auto th = z.subspan(0, n_ + 1);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(12 * (n_ + 1));
    const auto n = static_cast<int>(n_);
    const int off = n + 1;
    const double h = h_;
    const double h2 = h * h;

    trips.emplace_back(0, 0, 1.0);
    trips.emplace_back(1, 0, -3.0 / (2.0 * h));
    trips.emplace_back(1, 1, 4.0 / (2.0 * h));
    trips.emplace_back(1, 2, -1.0 / (2.0 * h));
    trips.emplace_back(n - 1, n, 3.0 / (2.0 * h));
    trips.emplace_back(n - 1, n - 1, -4.0 / (2.0 * h));
    trips.emplace_back(n - 1, n - 2, 1.0 / (2.0 * h));
    trips.emplace_back(n, n, 1.0);

    const double l1 = config_.lambda1 / h2;
    for (int i = 2; i <= n - 2; ++i) {
      trips.emplace_back(i, off + i - 1, -l1);
      trips.emplace_back(i, off + i, 2.0 * l1 + config_.lambda);
      trips.emplace_back(i, off + i + 1, -l1);
      trips.emplace_back(i, i, -0.5 * objective_.curvature(th[static_cast<std::size_t>(i)],
                                                            grid_.time(static_cast<std::size_t>(i))));
    }

    trips.emplace_back(off, off, h2);
    trips.emplace_back(off, 0, -2.0);
    trips.emplace_back(off, 1, 5.0);
    trips.emplace_back(off, 2, -4.0);
    trips.emplace_back(off, 3, 1.0);
    for (int i = 1; i < n; ++i) {
      trips.emplace_back(off + i, off + i, h2);
      trips.emplace_back(off + i, i - 1, -1.0);
      trips.emplace_back(off + i, i, 2.0);
      trips.emplace_back(off + i, i + 1, -1.0);
    }
    trips.emplace_back(off + n, off + n, h2);
    trips.emplace_back(off + n, n, -2.0);
    trips.emplace_back(off + n, n - 1, 5.0);
    trips.emplace_back(off + n, n - 2, -4.0);
    trips.emplace_back(off + n, n - 3, 1.0);

    Eigen::SparseMatrix<double> jac(off * 2, off * 2);
    jac.setFromTriplets(trips.begin(), trips.end());
    jac.makeCompressed();
    return jac;
  }

  std::vector<double> initial_state(std::span<const double> theta) const {
    std::vector<double> z(unknowns());
    std::copy(theta.begin(), theta.end(), z.begin());
    const double h2 = h_ * h_;
    for (std::size_t i = 0; i <= n_; ++i) z[n_ + 1 + i] = second_difference(theta, i) / h2;
    return z;
  }

 private:
  const EL4Config& config_;
  const Objective& objective_;
  std::size_t n_;
  double h_;
  TimeGrid grid_;
};

EL4Solution finish(const EL4Config& config, const Objective& objective, std::vector<double> z,
                   double residual_norm, int iterations, EL4Status status, std::string message) {
  const TimeGrid grid = config.grid();
  const std::size_t m = config.n + 1;
  std::vector<double> theta(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(m));
  std::vector<double> u(z.begin() + static_cast<std::ptrdiff_t>(m), z.end());
  std::vector<double> v = differentiate(theta, grid.spacing());

  PulseGrid pulse(grid, v);
  ThetaTrajectory traj{grid, std::move(theta), std::move(v)};

  FunctionalValues f;
  f.energy = pulse_energy(pulse);
  f.curvature = pulse_curvature(pulse);
  f.width = width_functional(traj);
  std::vector<double> occ(m);
  for (std::size_t i = 0; i < m; ++i) occ[i] = objective.occupation(traj.theta[i], grid.time(i));
  f.n2 = trapezoid(occ, grid.spacing());

  std::optional<double> n2_ode;
  if (objective.system()) {
    n2_ode = average_occupation(integrate_liouville(*objective.system(), pulse, config.ode_substeps));
  }

  const bool ok = status == EL4Status::Converged;
  return EL4Solution{config,  std::move(traj), std::move(pulse), std::move(u), residual_norm,
                     f,       n2_ode,          iterations,       ok,           status,
                     std::move(message)};
}

}  // namespace

std::vector<double> el4_residual(const EL4Config& config, const Objective& objective,
                                 const ThetaTrajectory& theta) {
  config.validate();
  theta.validate();
  if (theta.theta.size() != config.n + 1) {
    throw InputError("el4_residual: trajectory has " + std::to_string(theta.theta.size()) +
                     " nodes, config expects " + std::to_string(config.n + 1));
  }
  const auto& th = theta.theta;
  const std::size_t n = config.n;
  const double h = theta.grid.spacing();
  std::vector<double> r(n + 1, 0.0);
  boundary_rows(config, th, h, r);

  // Staged differences keep the 1/h^4 amplification from adding rounding noise.
  std::vector<double> d1(n), d2(n + 1, 0.0), d3(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d1[i] = th[i + 1] - th[i];
  for (std::size_t i = 1; i < n; ++i) d2[i] = d1[i] - d1[i - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) d3[i] = d2[i + 1] - d2[i];
  const double h2 = h * h;
  const double h4 = h2 * h2;
  for (std::size_t i = 2; i + 2 <= n; ++i) {
    const double d4 = d3[i] - d3[i - 1];
    r[i] = -config.lambda1 * d4 / h4 + config.lambda * d2[i] / h2 -
           0.5 * objective.gradient(th[i], theta.grid.time(i));
  }
  return r;
}

std::vector<double> el4_residual(const EL4Config& config, const SystemParams& params,
                                 const ThetaTrajectory& theta, ClosedFormMode mode) {
  return el4_residual(config, Objective::closed_form(params, mode), theta);
}

std::array<double, 4> boundary_residuals(const EL4Config& config, const ThetaTrajectory& theta) {
  theta.validate();
  const std::size_t n = theta.theta.size() - 1;
  if (n < 4) throw InputError("boundary_residuals: need at least 4 grid intervals");
  std::vector<double> r(n + 1, 0.0);
  boundary_rows(config, theta.theta, theta.grid.spacing(), r);
  return {r[0], r[1], r[n - 1], r[n]};
}

std::vector<double> el4_split_residual(const EL4Config& config, const Objective& objective,
                                       std::span<const double> theta,
                                       std::span<const double> second_derivative) {
  config.validate();
  if (theta.size() != config.n + 1 || second_derivative.size() != config.n + 1) {
    throw InputError("el4_split_residual: size mismatch");
  }
  std::vector<double> z(theta.begin(), theta.end());
  z.insert(z.end(), second_derivative.begin(), second_derivative.end());
  return SplitSystem(config, objective).residual(z);
}

ThetaTrajectory quintic_initial_guess(const EL4Config& config) {
  const TimeGrid grid = config.grid();
  std::vector<double> th(grid.size());
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double s = (grid.time(i) - grid.start()) / grid.duration();
    th[i] = config.theta_T * s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
  }
  return {grid, std::move(th), std::nullopt};
}

EL4Solution solve_el4(const EL4Config& config, const Objective& objective,
                      const std::optional<ThetaTrajectory>& initial_guess) {
  config.validate();
  const TimeGrid grid = config.grid();
  std::vector<double> start;
  if (initial_guess) {
    initial_guess->validate();
    start = interpolate_onto(*initial_guess, grid);
  } else {
    start = quintic_initial_guess(config).theta;
  }

  SplitSystem system(config, objective);
  std::vector<double> z = system.initial_state(start);
  std::vector<double> r = system.residual(z);
  double norm = max_abs(r);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  constexpr double kMinStep = 0x1p-20;
  constexpr double kArmijo = 1e-4;

  for (int iter = 0;; ++iter) {
    if (norm < config.newton_tol) {
      return finish(config, objective, std::move(z), norm, iter, EL4Status::Converged, "");
    }
    if (iter >= config.max_iter) {
      return finish(config, objective, std::move(z), norm, iter, EL4Status::MaxIterations,
                    "no convergence after " + std::to_string(iter) + " iterations");
    }

    const Eigen::SparseMatrix<double> jac = system.jacobian(z);
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) {
      return finish(config, objective, std::move(z), norm, iter, EL4Status::SingularJacobian,
                    "sparse LU failed: " + lu.lastErrorMessage());
    }
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    const Eigen::VectorXd step = lu.solve(-rv);
    if (lu.info() != Eigen::Success || !step.allFinite()) {
      return finish(config, objective, std::move(z), norm, iter, EL4Status::SingularJacobian,
                    "Newton step is not finite");
    }

    const double merit = l2(r);
    bool accepted = false;
    for (double alpha = config.damping; alpha >= kMinStep; alpha *= 0.5) {
      std::vector<double> trial(z);
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] += alpha * step[static_cast<Eigen::Index>(k)];
      std::vector<double> r_trial = system.residual(trial);
      if (l2(r_trial) <= (1.0 - kArmijo * alpha) * merit) {
        z = std::move(trial);
        r = std::move(r_trial);
        norm = max_abs(r);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      return finish(config, objective, std::move(z), norm, iter + 1, EL4Status::LineSearchFailed,
                    "line search found no decrease down to step 2^-20");
    }
  }
}

EL4Solution solve_el4(const EL4Config& config, const SystemParams& params, ClosedFormMode mode,
                      const std::optional<ThetaTrajectory>& initial_guess) {
  return solve_el4(config, Objective::closed_form(params, mode), initial_guess);
}

namespace {

// One inner evaluation of the outer constraint-matching iteration.
class MatchEvaluator {
 public:
  MatchEvaluator(const Objective& objective, MatchTargets targets, const MatchOptions& options)
      : objective_(objective), targets_(targets), options_(options) {}

  struct Point {
    double lambda;
    double log_abs_lambda1;
    double theta_T;
  };

  struct Eval {
    Point p;
    Eigen::Vector2d mismatch;
    EL4Solution solution;
  };

  double lambda1_of(const Point& p) const {
    return std::copysign(std::exp(p.log_abs_lambda1), options_.lambda1_seed);
  }

  std::optional<Eval> evaluate(const Point& p, const EL4Solution* warm) const {
    EL4Config cfg;
    cfg.lambda = p.lambda;
    cfg.lambda1 = lambda1_of(p);
    cfg.theta_T = p.theta_T;
    cfg.duration = options_.duration;
    cfg.n = options_.n;
    cfg.newton_tol = options_.newton_tol;
    cfg.max_iter = options_.newton_max_iter;

    std::optional<ThetaTrajectory> guess;
    if (warm) {
      ThetaTrajectory g{warm->theta.grid, warm->theta.theta, std::nullopt};
      const double old_T = warm->config.theta_T;
      if (old_T != p.theta_T && old_T != 0.0) {
        for (double& x : g.theta) x *= p.theta_T / old_T;
      }
      guess = std::move(g);
    }
    EL4Solution sol = solve_el4(cfg, objective_, guess);
    if (!sol.converged && warm) sol = solve_el4(cfg, objective_, std::nullopt);
    if (!sol.converged) return std::nullopt;
    Eigen::Vector2d f(sol.functionals.energy / targets_.energy - 1.0,
                      sol.functionals.curvature / targets_.curvature - 1.0);
    return Eval{p, f, std::move(sol)};
  }

 private:
  const Objective& objective_;
  MatchTargets targets_;
  const MatchOptions& options_;
};

using Point = MatchEvaluator::Point;

Point advance(const Point& p, const Eigen::Vector3d& d, double alpha) {
  return {p.lambda + alpha * d[0], p.log_abs_lambda1 + alpha * d[1], p.theta_T + alpha * d[2]};
}

// Caps the step so a single outer iteration cannot jump across solution branches.
Eigen::Vector3d limit_step(const Point& p, Eigen::Vector3d d) {
  double scale = 1.0;
  const double lam_cap = std::max(2.0 * std::abs(p.lambda), 0.1);
  if (std::abs(d[0]) > lam_cap) scale = std::min(scale, lam_cap / std::abs(d[0]));
  if (std::abs(d[1]) > 1.0) scale = std::min(scale, 1.0 / std::abs(d[1]));
  const double th_cap = std::max(0.2 * std::abs(p.theta_T), 0.1);
  if (std::abs(d[2]) > th_cap) scale = std::min(scale, th_cap / std::abs(d[2]));
  return d * scale;
}

}  // namespace

MatchResult match_constraints(const Objective& objective, MatchTargets targets,
                              const MatchOptions& options) {
  if (!(targets.energy > 0.0) || !(targets.curvature > 0.0)) {
    throw InputError("match_constraints: targets must be positive");
  }
  if (options.lambda1_seed == 0.0) throw InputError("match_constraints: lambda1 seed must be nonzero");
  if (!(options.rel_tol > 0.0) || options.max_outer < 1) {
    throw InputError("match_constraints: invalid tolerance or iteration cap");
  }

  MatchEvaluator evaluator(objective, targets, options);
  MatchResult result;
  auto record = [&](const MatchEvaluator::Eval& e, int iterations) {
    result.lambda = e.p.lambda;
    result.lambda1 = evaluator.lambda1_of(e.p);
    result.theta_T = e.p.theta_T;
    result.solution = e.solution;
    result.rel_error = e.mismatch.cwiseAbs().maxCoeff();
    result.iterations = iterations;
  };

  const Point start{options.lambda_seed, std::log(std::abs(options.lambda1_seed)), options.theta_T};
  auto current = evaluator.evaluate(start, nullptr);
  if (!current) {
    result.lambda = start.lambda;
    result.lambda1 = options.lambda1_seed;
    result.theta_T = options.theta_T;
    result.message = "inner EL4 solve failed at the seed multipliers";
    return result;
  }
  record(*current, 0);

  const int free_dims = options.free_theta_T ? 3 : 2;
  auto fd_jacobian = [&](const MatchEvaluator::Eval& at) -> std::optional<Eigen::Matrix<double, 2, 3>> {
    Eigen::Matrix<double, 2, 3> jac = Eigen::Matrix<double, 2, 3>::Zero();
    const std::array<double, 3> steps{1e-4 * std::max(std::abs(at.p.lambda), 1e-2), 1e-4,
                                      1e-4 * std::max(std::abs(at.p.theta_T), 1e-2)};
    for (int c = 0; c < free_dims; ++c) {
      Eigen::Vector3d dir = Eigen::Vector3d::Zero();
      dir[c] = steps[static_cast<std::size_t>(c)];
      auto probe = evaluator.evaluate(advance(at.p, dir, 1.0), &at.solution);
      if (!probe) return std::nullopt;
      jac.col(c) = (probe->mismatch - at.mismatch) / steps[static_cast<std::size_t>(c)];
    }
    return jac;
  };

  auto jac = fd_jacobian(*current);
  bool fresh_jacobian = true;
  for (int it = 1; it <= options.max_outer; ++it) {
    if (current->mismatch.cwiseAbs().maxCoeff() < options.rel_tol) {
      result.converged = true;
      record(*current, it - 1);
      return result;
    }
    if (!jac) {
      result.message = "finite-difference Jacobian probe failed";
      return result;
    }

    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    if (free_dims == 2) {
      const Eigen::Matrix2d j2 = jac->leftCols<2>();
      Eigen::FullPivLU<Eigen::Matrix2d> lu(j2);
      if (!lu.isInvertible()) {
        result.message = "singular multiplier Jacobian";
        return result;
      }
      step.head<2>() = lu.solve(-current->mismatch);
    } else {
      const Eigen::Vector3d scale(std::max(std::abs(current->p.lambda), 1e-2), 1.0,
                                  std::max(std::abs(current->p.theta_T), 1e-2));
      const Eigen::Matrix<double, 2, 3> js = *jac * scale.asDiagonal();
      const Eigen::Matrix2d gram = js * js.transpose();
      Eigen::FullPivLU<Eigen::Matrix2d> lu(gram);
      if (!lu.isInvertible()) {
        result.message = "singular multiplier Jacobian";
        return result;
      }
      step = scale.asDiagonal() * (js.transpose() * lu.solve(-current->mismatch));
    }
    step = limit_step(current->p, step);

    std::optional<MatchEvaluator::Eval> next;
    double alpha = 1.0;
    for (int k = 0; k < 12; ++k, alpha *= 0.5) {
      auto trial = evaluator.evaluate(advance(current->p, step, alpha), &current->solution);
      if (trial && trial->mismatch.norm() < current->mismatch.norm()) {
        next = std::move(trial);
        break;
      }
    }
    if (!next) {
      if (!fresh_jacobian) {
        jac = fd_jacobian(*current);
        fresh_jacobian = true;
        continue;
      }
      result.message = "no decrease of the constraint mismatch along the Newton direction";
      return result;
    }

    const Eigen::Vector3d dp(next->p.lambda - current->p.lambda,
                             next->p.log_abs_lambda1 - current->p.log_abs_lambda1,
                             next->p.theta_T - current->p.theta_T);
    const Eigen::Vector2d df = next->mismatch - current->mismatch;
    current = std::move(next);
    record(*current, it);
    if (free_dims == 2) {
      // Broyden rank-one update.
      const double denom = dp.squaredNorm();
      if (denom > 0.0) *jac += ((df - *jac * dp) * dp.transpose()) / denom;
      fresh_jacobian = false;
    } else {
      jac = fd_jacobian(*current);
      fresh_jacobian = true;
    }
  }

  if (current->mismatch.cwiseAbs().maxCoeff() < options.rel_tol) {
    result.converged = true;
  } else {
    result.message = "outer iteration cap reached";
  }
  return result;
}

MatchResult match_constraints(const SystemParams& params, ClosedFormMode mode,
                              MatchTargets targets, const MatchOptions& options) {
  return match_constraints(Objective::closed_form(params, mode), targets, options);
}

std::vector<EL4Solution> scan_theta_T(const EL4Config& base, const Objective& objective,
                                      std::span<const double> theta_T_values) {
  std::vector<EL4Solution> out;
  out.reserve(theta_T_values.size());
  const EL4Solution* warm = nullptr;
  for (double theta_T : theta_T_values) {
    EL4Config cfg = base;
    cfg.theta_T = theta_T;
    std::optional<ThetaTrajectory> guess;
    if (warm && warm->config.theta_T != 0.0) {
      ThetaTrajectory g{warm->theta.grid, warm->theta.theta, std::nullopt};
      for (double& x : g.theta) x *= theta_T / warm->config.theta_T;
      guess = std::move(g);
    }
    out.push_back(solve_el4(cfg, objective, guess));
    warm = out.back().converged ? &out.back() : nullptr;
  }
  return out;
}

}  // namespace occopt
