#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace occopt::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kSolverFailure = 2,
  kBoundViolation = 3,
};

struct Options {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

// Each command writes its files into out_dir, a short summary to `out` and
// diagnostics to `err`, and returns an ExitCode. Exceptions are mapped to
// exit codes, never propagated.

/// trajectory_ode.csv, trajectory_closed_form.csv, simulate.log
int cmd_simulate(const Options& options, std::ostream& out, std::ostream& err);
/// pulse.csv, run.log
int cmd_optimize(const Options& options, std::ostream& out, std::ostream& err);
/// sweep.csv, sweep.log
int cmd_sweep(const Options& options, std::ostream& out, std::ostream& err);
/// bound_report.csv
int cmd_bound(const Options& options, std::ostream& out, std::ostream& err);

/// Dispatches on "simulate", "optimize", "sweep" or "bound".
int run_command(const std::string& name, const Options& options, std::ostream& out,
                std::ostream& err);

}  // namespace occopt::cli
