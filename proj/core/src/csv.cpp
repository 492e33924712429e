#include "occopt/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "occopt/error.hpp"

namespace occopt {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError(fmt::format("line {}: cannot parse number '{}'", line, s));
  }
  return x;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

void check_written(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw InputError("write to " + path.string() + " failed");
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

void write_pulse_csv(std::ostream& out, const PulseGrid& pulse) {
  out << "t,V\n";
  for (std::size_t i = 0; i < pulse.size(); ++i) {
    out << fmt::format("{:.17g},{:.17g}\n", pulse.grid().time(i), pulse[i]);
  }
}

void write_pulse_csv(const std::filesystem::path& path, const PulseGrid& pulse) {
  auto out = open_out(path);
  write_pulse_csv(out, pulse);
  check_written(out, path);
}

PulseGrid read_pulse_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  if (trim(line) != "t,V") throw InputError("pulse file: expected header 't,V'");

  std::vector<double> t;
  std::vector<double> v;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw InputError(fmt::format("pulse file line {}: expected two columns", lineno));
    }
    t.push_back(parse_double(row.substr(0, comma), lineno));
    v.push_back(parse_double(row.substr(comma + 1), lineno));
  }
  if (t.size() < 3) throw InputError("pulse file: need at least 3 rows");

  const std::size_t n = t.size() - 1;
  const double duration = t.back() - t.front();
  if (!(duration > 0.0)) throw InputError("pulse file: times must increase");
  const TimeGrid grid(t.front(), duration, n);
  for (std::size_t i = 0; i <= n; ++i) {
    if (std::abs(t[i] - grid.time(i)) > 1e-9 * duration) {
      throw InputError(fmt::format("pulse file: node {} (t={}) is off the uniform grid", i, t[i]));
    }
  }
  return PulseGrid(grid, std::move(v));
}

PulseGrid read_pulse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open pulse file " + path.string());
  return read_pulse_csv(in);
}

void write_trajectory_csv(std::ostream& out, const PulseGrid& pulse, const ThetaTrajectory& theta,
                          const DensityTrajectory& density) {
  const std::size_t m = pulse.size();
  if (theta.theta.size() != m || density.states.size() != m) {
    throw InputError("trajectory csv: pulse, theta and density sizes differ");
  }
  out << "t,V,theta,rho11,rho22,re_rho12,im_rho12\n";
  for (std::size_t i = 0; i < m; ++i) {
    const DensityState& s = density.states[i];
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},", pulse.grid().time(i), pulse[i],
                       theta.theta[i], s.rho11, s.rho22);
    if (s.rho12) {
      out << fmt::format("{:.17g},{:.17g}\n", s.rho12->real(), s.rho12->imag());
    } else {
      out << ",\n";
    }
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const PulseGrid& pulse,
                          const ThetaTrajectory& theta, const DensityTrajectory& density) {
  auto out = open_out(path);
  write_trajectory_csv(out, pulse, theta, density);
  check_written(out, path);
}

void RunLog::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void RunLog::set(std::string key, double value) { set(std::move(key), format_double(value)); }
void RunLog::set(std::string key, long long value) { set(std::move(key), std::to_string(value)); }
void RunLog::set(std::string key, bool value) {
  set(std::move(key), std::string(value ? "true" : "false"));
}

void RunLog::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
}

void RunLog::write(const std::filesystem::path& path) const {
  auto out = open_out(path);
  write(out);
  check_written(out, path);
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(fmt::format("line {}: expected key = value", lineno));
    }
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (key.empty()) throw InputError(fmt::format("line {}: empty key", lineno));
    if (!seen.insert(key).second) throw InputError(fmt::format("line {}: duplicate key '{}'", lineno, key));
    out.emplace_back(key, value);
  }
  return out;
}

void write_bound_report(std::ostream& out, const BoundReport& report,
                        const std::vector<std::pair<std::string, std::string>>& header) {
  for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
  out << fmt::format("# violating_nodes={}\n# violating_pulses={}\n# n2_violations={}\n",
                     report.violating_nodes, report.violating_pulses, report.n2_violations);
  out << "# max_excess=" << format_double(report.max_excess) << '\n';
  out << "# condition_fraction=" << format_double(report.condition_fraction) << '\n';
  for (const BoundRow& r : report.rows) {
    if (r.error) out << fmt::format("# failed={}: {}\n", r.pulse_id, *r.error);
  }
  out << "pulse_id,n2,n2_bound,max_excess,condition_fraction\n";
  for (const BoundRow& r : report.rows) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.pulse_id, r.n2, r.n2_bound,
                       r.max_excess, r.condition_fraction);
  }
}

}  // namespace occopt
