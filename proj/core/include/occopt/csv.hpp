#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "occopt/bounds.hpp"
#include "occopt/density.hpp"
#include "occopt/grid.hpp"

namespace occopt {

/// 17 significant digits: parses back to the identical double.
std::string format_double(double x);

/// Header `t,V`, one row per node.
void write_pulse_csv(std::ostream& out, const PulseGrid& pulse);
void write_pulse_csv(const std::filesystem::path& path, const PulseGrid& pulse);

/// Reads the `t,V` format. Throws InputError on a malformed file, fewer than 3
/// rows, or nodes deviating from a uniform grid by more than 1e-9 relative to
/// the duration.
PulseGrid read_pulse_csv(std::istream& in);
PulseGrid read_pulse_csv(const std::filesystem::path& path);

/// Header `t,V,theta,rho11,rho22,re_rho12,im_rho12`; coherence columns are
/// empty for states without a stored coherence.
void write_trajectory_csv(std::ostream& out, const PulseGrid& pulse, const ThetaTrajectory& theta,
                          const DensityTrajectory& density);
void write_trajectory_csv(const std::filesystem::path& path, const PulseGrid& pulse,
                          const ThetaTrajectory& theta, const DensityTrajectory& density);

/// Ordered key=value lines.
class RunLog {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, long long value);
  void set(std::string key, bool value);

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses `key=value` lines (blank lines and `#` comments skipped, whitespace
/// around key and value trimmed). Throws InputError on a line without '='
/// or a repeated key.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);

/// `# key=value` header lines, then `pulse_id,n2,n2_bound,max_excess,condition_fraction`.
/// Failed pulses are written with nan values and listed as `# failed=<id>: <reason>`.
void write_bound_report(std::ostream& out, const BoundReport& report,
                        const std::vector<std::pair<std::string, std::string>>& header = {});

}  // namespace occopt
