#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "occopt_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"occopt: optimal control of a driven two-level system with relaxation"};
  app.require_subcommand(1);

  occopt::cli::Options options;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--threads", options.threads, "Worker threads for sweep and bound")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  const char* commands[][2] = {
      {"simulate", "Integrate a pulse file and evaluate the closed-form occupation"},
      {"optimize", "Solve the Euler-Lagrange problem (mode = el4 or el2)"},
      {"sweep", "Solve over a grid of multipliers or target functionals"},
      {"bound", "Check random or given pulses against the occupation ceiling"},
  };
  std::string config;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "key = value configuration file")->required();
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : occopt::cli::kInputError;
  }

  options.config = config;
  options.out_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  return occopt::cli::run_command(app.get_subcommands().front()->get_name(), options, std::cout,
                                  std::cerr);
}
