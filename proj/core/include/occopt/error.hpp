#pragma once

#include <stdexcept>
#include <string>

namespace occopt {

/// Malformed or out-of-domain input. Maps to CLI exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical solver failed to produce a usable result. Maps to CLI exit code 2.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual_norm, int iterations)
      : std::runtime_error(what), residual_norm_(residual_norm), iterations_(iterations) {}

  double residual_norm() const noexcept { return residual_norm_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_norm_;
  int iterations_;
};

}  // namespace occopt
