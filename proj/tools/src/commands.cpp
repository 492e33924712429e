#include "occopt_cli/commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>
#include <vector>

#include "occopt/bounds.hpp"
#include "occopt/csv.hpp"
#include "occopt/dynamics.hpp"
#include "occopt/el2.hpp"
#include "occopt/el4.hpp"
#include "occopt/error.hpp"
#include "occopt/functionals.hpp"
#include "occopt_cli/run_config.hpp"

namespace occopt::cli {

namespace {

const std::set<std::string> kSystemKeys = {"mu", "gamma1", "gamma2", "substeps", "closed_form_mode"};

const std::set<std::string> kEl4Keys = {
    "objective", "lambda",    "lambda1",  "theta_T", "duration",     "n",
    "newton_tol", "max_iter", "damping",  "target_energy", "target_curvature",
    "free_theta_T", "lambda_seed", "lambda1_seed", "rel_tol", "max_outer"};

std::set<std::string> keys(std::initializer_list<const std::set<std::string>*> parts,
                           std::initializer_list<const char*> extra = {}) {
  std::set<std::string> out;
  for (const auto* p : parts) out.insert(p->begin(), p->end());
  out.insert(extra.begin(), extra.end());
  return out;
}

struct SystemSettings {
  SystemParams params;
  std::size_t substeps;
  ClosedFormMode mode;
};

SystemSettings system_settings(const RunConfig& cfg) {
  SystemSettings s{SystemParams{cfg.get_double("mu", 1.0), cfg.get_double("gamma1", 0.0),
                                cfg.get_double("gamma2", 0.0)},
                   cfg.get_size("substeps", kDefaultSubsteps),
                   parse_closed_form_mode(cfg.get_string("closed_form_mode", "calibrated").c_str())};
  s.params.validate();
  if (s.substeps == 0) throw InputError("config: substeps must be >= 1");
  return s;
}

Objective make_objective(const RunConfig& cfg, const SystemSettings& sys) {
  const std::string kind = cfg.get_string("objective", "closed_form");
  if (kind == "closed_form") return Objective::closed_form(sys.params, sys.mode);
  if (kind == "zero") return Objective::zero();
  throw InputError("config: objective must be closed_form or zero, got '" + kind + "'");
}

EL4Config el4_config(const RunConfig& cfg, const SystemSettings& sys) {
  EL4Config c;
  c.lambda = cfg.get_double("lambda", c.lambda);
  c.lambda1 = cfg.get_double("lambda1", c.lambda1);
  c.theta_T = cfg.get_double("theta_T", c.theta_T);
  c.duration = cfg.get_double("duration", c.duration);
  c.n = cfg.get_size("n", c.n);
  c.newton_tol = cfg.get_double("newton_tol", c.newton_tol);
  c.max_iter = static_cast<int>(cfg.get_size("max_iter", static_cast<std::size_t>(c.max_iter)));
  c.damping = cfg.get_double("damping", c.damping);
  c.ode_substeps = sys.substeps;
  c.validate();
  return c;
}

MatchOptions match_options(const RunConfig& cfg, const EL4Config& base) {
  MatchOptions o;
  o.theta_T = base.theta_T;
  o.duration = base.duration;
  o.n = base.n;
  o.newton_tol = base.newton_tol;
  o.newton_max_iter = base.max_iter;
  o.lambda_seed = cfg.get_double("lambda_seed", o.lambda_seed);
  o.lambda1_seed = cfg.get_double("lambda1_seed", o.lambda1_seed);
  o.free_theta_T = cfg.get_bool("free_theta_T", o.free_theta_T);
  o.rel_tol = cfg.get_double("rel_tol", o.rel_tol);
  o.max_outer = static_cast<int>(cfg.get_size("max_outer", static_cast<std::size_t>(o.max_outer)));
  return o;
}

void prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw InputError("cannot create output directory " + dir.string());
  }
}

// Runs f(i) for i in [0, count) on up to `threads` workers. Results must be
// written to index-addressed storage so output order never depends on scheduling.
template <typename F>
void parallel_for(std::size_t count, std::size_t threads, F&& f) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kInputError;
  } catch (const SolverError& e) {
    fmt::print(err, "solver failure: {} (residual {:.3g} after {} iterations)\n", e.what(),
               e.residual_norm(), e.iterations());
    return kSolverFailure;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kInputError;
  }
}

void log_el4(RunLog& log, const EL4Solution& s) {
  const auto bc = boundary_residuals(s.config, s.theta);
  log.set("lambda", s.config.lambda);
  log.set("lambda1", s.config.lambda1);
  log.set("theta_T", s.config.theta_T);
  log.set("duration", s.config.duration);
  log.set("n", static_cast<long long>(s.config.n));
  log.set("status", std::string(to_string(s.status)));
  log.set("converged", s.converged);
  log.set("iterations", static_cast<long long>(s.iterations));
  log.set("residual_norm", s.residual_norm);
  log.set("bc_theta_0", bc[0]);
  log.set("bc_dtheta_0", bc[1]);
  log.set("bc_dtheta_T", bc[2]);
  log.set("bc_theta_T", bc[3]);
  log.set("energy", s.functionals.energy);
  log.set("curvature", s.functionals.curvature);
  log.set("width", s.functionals.width);
  log.set("n2", s.functionals.n2);
  if (s.n2_ode) log.set("n2_ode", *s.n2_ode);
  if (!s.message.empty()) log.set("message", s.message);
}

int optimize_el4(const RunConfig& cfg, const Options& options, std::ostream& out) {
  const SystemSettings sys = system_settings(cfg);
  const Objective objective = make_objective(cfg, sys);
  const EL4Config base = el4_config(cfg, sys);
  const bool targeted = cfg.has("target_energy") || cfg.has("target_curvature");

  RunLog log;
  log.set("mode", std::string("el4"));
  log.set("objective", cfg.get_string("objective", "closed_form"));
  log.set("closed_form_mode", std::string(to_string(sys.mode)));
  log.set("mu", sys.params.mu);
  log.set("gamma1", sys.params.gamma1);
  log.set("gamma2", sys.params.gamma2);
  log.set("substeps", static_cast<long long>(sys.substeps));

  std::optional<EL4Solution> solution;
  bool ok = false;
  if (targeted) {
    cfg.require({"target_energy", "target_curvature"});
    if (cfg.has("lambda") || cfg.has("lambda1")) {
      throw InputError("config: give either lambda/lambda1 or target_energy/target_curvature");
    }
    const MatchTargets targets{cfg.get_double("target_energy"), cfg.get_double("target_curvature")};
    const MatchOptions mopts = match_options(cfg, base);
    log.set("lambda_seed", mopts.lambda_seed);
    log.set("lambda1_seed", mopts.lambda1_seed);
    log.set("free_theta_T", mopts.free_theta_T);
    const MatchResult m = match_constraints(objective, targets, mopts);
    log.set("target_energy", targets.energy);
    log.set("target_curvature", targets.curvature);
    log.set("match_converged", m.converged);
    log.set("match_iterations", static_cast<long long>(m.iterations));
    log.set("match_rel_error", m.rel_error);
    if (!m.message.empty()) log.set("match_message", m.message);
    solution = m.solution;
    ok = m.converged && solution && solution->converged;
  } else {
    solution = solve_el4(base, objective);
    ok = solution->converged;
  }

  if (solution) {
    // Replayable n2 for the exact pulse written to disk.
    if (!solution->n2_ode) {
      solution->n2_ode = average_occupation(integrate_liouville(sys.params, solution->pulse, sys.substeps));
    }
    log_el4(log, *solution);
    write_pulse_csv(options.out_dir / "pulse.csv", solution->pulse);
  }
  log.write(options.out_dir / "run.log");

  if (!ok) {
    fmt::print(out, "el4: no converged solution (see run.log)\n");
    return kSolverFailure;
  }
  fmt::print(out, "el4: converged, E0={:.6g} R={:.6g} n2={:.6g}\n", solution->functionals.energy,
             solution->functionals.curvature, solution->functionals.n2);
  return kSuccess;
}

int optimize_el2(const RunConfig& cfg, const Options& options, std::ostream& out) {
  const SystemSettings sys = system_settings(cfg);
  EL2Config c;
  cfg.require({"C"});
  c.C = cfg.get_double("C");
  c.duration = cfg.get_double("duration", c.duration);
  c.n = cfg.get_size("n", c.n);
  c.inversion_gap = cfg.get_double("inversion_gap", c.inversion_gap);
  const EL2Solution s = solve_el2(c);

  const DensityTrajectory free = decoherence_free_occupation(s.theta);
  const double n2_ode = average_occupation(integrate_liouville(sys.params, s.pulse, sys.substeps));

  RunLog log;
  log.set("mode", std::string("el2"));
  log.set("C", c.C);
  log.set("duration", c.duration);
  log.set("n", static_cast<long long>(c.n));
  log.set("mu", sys.params.mu);
  log.set("gamma1", sys.params.gamma1);
  log.set("gamma2", sys.params.gamma2);
  log.set("substeps", static_cast<long long>(sys.substeps));
  log.set("v0", s.v0);
  log.set("lambda_prime", s.lambda_prime);
  log.set("residual_norm", s.residual_norm);
  log.set("theta_T", s.theta.theta.back());
  log.set("theta_T_error", s.theta.theta.back() - std::numbers::pi / 2.0);
  log.set("V_T", s.pulse.values().back());
  log.set("energy", pulse_energy(s.pulse));
  log.set("curvature", pulse_curvature(s.pulse));
  log.set("width", width_functional(s.theta));
  log.set("n2_decoherence_free", average_occupation(free));
  log.set("n2_ode", n2_ode);
  write_pulse_csv(options.out_dir / "pulse.csv", s.pulse);
  log.write(options.out_dir / "run.log");
  fmt::print(out, "el2: V0={:.17g} theta(T)={:.17g}\n", s.v0, s.theta.theta.back());
  return kSuccess;
}

struct SweepCell {
  double lambda1 = 0.0;
  double lambda = 0.0;
  double theta_T = 0.0;
  std::optional<EL4Solution> solution;
  std::string note;
};

}  // namespace

int cmd_simulate(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = RunConfig::load(options.config, keys({&kSystemKeys}, {"pulse"}));
    cfg.require({"pulse"});
    const SystemSettings sys = system_settings(cfg);
    const PulseGrid pulse = read_pulse_csv(std::filesystem::path(cfg.get_string("pulse")));
    prepare_out_dir(options.out_dir);

    const ThetaTrajectory theta = cumulative_area(pulse);
    const DensityTrajectory ode = integrate_liouville(sys.params, pulse, sys.substeps);
    const DensityTrajectory closed = rho22_closed_form_trajectory(sys.params, theta, sys.mode);
    write_trajectory_csv(options.out_dir / "trajectory_ode.csv", pulse, theta, ode);
    write_trajectory_csv(options.out_dir / "trajectory_closed_form.csv", pulse, theta, closed);

    double deviation = 0.0;
    for (std::size_t i = 0; i < pulse.size(); ++i) {
      deviation = std::max(deviation, std::abs(ode.states[i].rho22 - closed.states[i].rho22));
    }
    RunLog log;
    log.set("pulse", cfg.get_string("pulse"));
    log.set("mu", sys.params.mu);
    log.set("gamma1", sys.params.gamma1);
    log.set("gamma2", sys.params.gamma2);
    log.set("substeps", static_cast<long long>(sys.substeps));
    log.set("closed_form_mode", std::string(to_string(sys.mode)));
    log.set("n2_ode", average_occupation(ode));
    log.set("n2_closed_form", average_occupation(closed));
    log.set("max_closed_form_deviation", deviation);
    if (std::any_of(pulse.values().begin(), pulse.values().end(), [](double v) { return v != 0.0; })) {
      log.set("validity_metric", validity_metric(sys.params, pulse));
    }
    log.write(options.out_dir / "simulate.log");
    fmt::print(out, "simulate: n2_ode={:.17g} max|closed-ode|={:.3g}\n", average_occupation(ode),
               deviation);
    return kSuccess;
  });
}

int cmd_optimize(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = RunConfig::load(
        options.config, keys({&kSystemKeys, &kEl4Keys}, {"mode", "C", "inversion_gap"}));
    cfg.require({"mode"});
    const std::string mode = cfg.get_string("mode");
    if (mode != "el4" && mode != "el2") throw InputError("config: mode must be el4 or el2");
    prepare_out_dir(options.out_dir);
    return mode == "el4" ? optimize_el4(cfg, options, out) : optimize_el2(cfg, options, out);
  });
}

int cmd_sweep(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = RunConfig::load(
        options.config, keys({&kSystemKeys, &kEl4Keys},
                             {"sweep", "lambda_values", "lambda1_values", "target_energy_values",
                              "target_curvature_values"}));
    const SystemSettings sys = system_settings(cfg);
    const Objective objective = make_objective(cfg, sys);
    const EL4Config base = el4_config(cfg, sys);
    const std::string kind = cfg.get_string("sweep", "multipliers");

    std::vector<double> outer;
    std::vector<double> inner;
    if (kind == "multipliers") {
      cfg.require({"lambda_values", "lambda1_values"});
      outer = cfg.get_list("lambda1_values");
      inner = cfg.get_list("lambda_values");
    } else if (kind == "targets") {
      cfg.require({"target_energy_values", "target_curvature_values"});
      outer = cfg.get_list("target_curvature_values");
      inner = cfg.get_list("target_energy_values");
    } else {
      throw InputError("config: sweep must be multipliers or targets");
    }
    prepare_out_dir(options.out_dir);

    const MatchOptions mopts = match_options(cfg, base);
    std::vector<SweepCell> cells(outer.size() * inner.size());
    if (kind == "multipliers") {
      // Rows are independent; along a row each solve is warm-started from the
      // previous converged cell, which keeps the continuation on one branch.
      parallel_for(outer.size(), options.threads, [&](std::size_t r) {
        std::optional<ThetaTrajectory> warm;
        for (std::size_t j = 0; j < inner.size(); ++j) {
          SweepCell& cell = cells[r * inner.size() + j];
          EL4Config c = base;
          c.lambda1 = outer[r];
          c.lambda = inner[j];
          cell.lambda1 = c.lambda1;
          cell.lambda = c.lambda;
          cell.theta_T = c.theta_T;
          try {
            EL4Solution s = solve_el4(c, objective, warm);
            if (s.converged) {
              warm = s.theta;
            } else {
              cell.note = s.message;
            }
            cell.solution = std::move(s);
          } catch (const InputError& e) {
            cell.note = e.what();
          }
        }
      });
    } else {
      parallel_for(cells.size(), options.threads, [&](std::size_t k) {
        SweepCell& cell = cells[k];
        const MatchResult m =
            match_constraints(objective, {inner[k % inner.size()], outer[k / inner.size()]}, mopts);
        cell.lambda1 = m.lambda1;
        cell.lambda = m.lambda;
        cell.theta_T = m.theta_T;
        if (m.converged) {
          cell.solution = m.solution;
        } else {
          cell.note = m.message;
        }
      });
    }

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::ofstream csv(options.out_dir / "sweep.csv");
    if (!csv) throw InputError("cannot write sweep.csv");
    csv << "cell,lambda1,lambda,theta_T,energy,curvature,n2,n2_ode,converged,residual_norm\n";
    std::size_t failed = 0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const SweepCell& c = cells[k];
      const bool ok = c.solution && c.solution->converged;
      if (!ok) ++failed;
      const auto field = [&](auto get) { return ok ? get(*c.solution) : nan; };
      csv << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g}\n", k,
                         c.lambda1, c.lambda, c.theta_T,
                         field([](const EL4Solution& s) { return s.functionals.energy; }),
                         field([](const EL4Solution& s) { return s.functionals.curvature; }),
                         field([](const EL4Solution& s) { return s.functionals.n2; }),
                         field([](const EL4Solution& s) { return s.n2_ode.value_or(std::numeric_limits<double>::quiet_NaN()); }),
                         ok ? "true" : "false",
                         c.solution ? c.solution->residual_norm : nan);
    }
    csv.flush();
    if (!csv) throw InputError("write to sweep.csv failed");

    // n2 must not drop as the achieved energy grows, per row of the grid.
    RunLog log;
    double worst_drop = 0.0;
    for (std::size_t r = 0; r < outer.size(); ++r) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t j = 0; j < inner.size(); ++j) {
        const SweepCell& c = cells[r * inner.size() + j];
        if (c.solution && c.solution->converged) {
          pts.emplace_back(c.solution->functionals.energy, c.solution->functionals.n2);
        }
      }
      std::sort(pts.begin(), pts.end());
      double drop = 0.0;
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& [e, n2] : pts) {
        drop = std::max(drop, best - n2);
        best = std::max(best, n2);
      }
      worst_drop = std::max(worst_drop, drop);
      fmt::print(out, "row {} ({}={:.6g}): {} cells, max n2 drop along E0 {:.3g} -> {}\n", r,
                 kind == "multipliers" ? "lambda1" : "target_curvature", outer[r], pts.size(), drop,
                 drop <= 1e-4 ? "monotone" : "NOT monotone");
    }
    log.set("sweep", kind);
    log.set("cells", static_cast<long long>(cells.size()));
    log.set("failed_cells", static_cast<long long>(failed));
    log.set("max_n2_drop", worst_drop);
    log.set("monotone", worst_drop <= 1e-4);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (!cells[k].note.empty()) log.set(fmt::format("cell_{}_failure", k), cells[k].note);
    }
    log.write(options.out_dir / "sweep.log");
    fmt::print(out, "sweep: {} cells, {} failed\n", cells.size(), failed);
    return failed == cells.size() && !cells.empty() ? int{kSolverFailure} : int{kSuccess};
  });
}

int cmd_bound(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = RunConfig::load(
        options.config, keys({&kSystemKeys}, {"count", "seed", "modes", "amplitude_scale",
                                              "duration", "n", "pulses"}));
    const SystemSettings sys = system_settings(cfg);

    std::vector<PulseGrid> pulses;
    std::vector<std::pair<std::string, std::string>> header;
    header.emplace_back("gamma1", format_double(sys.params.gamma1));
    header.emplace_back("gamma2", format_double(sys.params.gamma2));
    header.emplace_back("gamma_eff", format_double(effective_decay(sys.params)));
    header.emplace_back("lifetime_bound", format_double(lifetime_bound(sys.params)));
    header.emplace_back("substeps", std::to_string(sys.substeps));
    if (cfg.has("pulses")) {
      for (const std::string& p : cfg.get_words("pulses")) {
        pulses.push_back(read_pulse_csv(std::filesystem::path(p)));
      }
      header.emplace_back("source", "files");
    } else {
      EnsembleConfig e;
      e.count = cfg.get_size("count", e.count);
      e.seed = options.seed.value_or(cfg.get_size("seed", e.seed));
      e.modes = cfg.get_size("modes", e.modes);
      e.amplitude_scale = cfg.get_double("amplitude_scale", e.amplitude_scale);
      const TimeGrid grid(cfg.get_double("duration", 1.0), cfg.get_size("n", 400));
      if (e.count > 0) pulses = random_pulse_ensemble(e, grid);
      header.emplace_back("source", "ensemble");
      header.emplace_back("generator", kEnsembleGenerator);
      header.emplace_back("seed", std::to_string(e.seed));
      header.emplace_back("count", std::to_string(e.count));
      header.emplace_back("modes", std::to_string(e.modes));
      header.emplace_back("amplitude_scale", format_double(e.amplitude_scale));
      header.emplace_back("duration", format_double(grid.duration()));
      header.emplace_back("n2_bound", format_double(n2_upper_bound(grid.duration(), sys.params)));
    }
    prepare_out_dir(options.out_dir);

    std::vector<BoundRow> rows(pulses.size());
    parallel_for(pulses.size(), options.threads, [&](std::size_t i) {
      rows[i] = check_pulse(sys.params, pulses[i], i, sys.substeps);
    });
    const BoundReport report = assemble_report(sys.params, std::move(rows));
    double cf_excess = -std::numeric_limits<double>::infinity();
    for (const BoundRow& r : report.rows) {
      if (!r.error) cf_excess = std::max(cf_excess, r.closed_form_max_excess);
    }
    if (!report.rows.empty()) header.emplace_back("closed_form_max_excess", format_double(cf_excess));

    std::ofstream csv(options.out_dir / "bound_report.csv");
    if (!csv) throw InputError("cannot write bound_report.csv");
    write_bound_report(csv, report, header);
    csv.flush();
    if (!csv) throw InputError("write to bound_report.csv failed");

    fmt::print(out, "bound: {} pulses, {} failed, {} violating nodes, {} n2 violations, max excess {:.3g}\n",
               report.rows.size(), report.failed_pulses, report.violating_nodes, report.n2_violations,
               report.max_excess);
    return report.has_violation() ? int{kBoundViolation} : int{kSuccess};
  });
}

int run_command(const std::string& name, const Options& options, std::ostream& out,
                std::ostream& err) {
  if (name == "simulate") return cmd_simulate(options, out, err);
  if (name == "optimize") return cmd_optimize(options, out, err);
  if (name == "sweep") return cmd_sweep(options, out, err);
  if (name == "bound") return cmd_bound(options, out, err);
  fmt::print(err, "error: unknown command '{}'\n", name);
  return kInputError;
}

}  // namespace occopt::cli
