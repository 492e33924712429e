#include "occopt_cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "occopt/csv.hpp"
#include "occopt/error.hpp"

namespace occopt::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

double to_double(const std::string& key, std::string_view s) {
  s = trim(s);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
    throw InputError("config: '" + key + "' must be a finite number, got '" + std::string(s) + "'");
  }
  return x;
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

}  // namespace

RunConfig::RunConfig(std::istream& in, const std::set<std::string>& allowed) {
  for (auto& [key, value] : parse_key_values(in)) {
    if (!allowed.count(key)) throw InputError("config: unknown key '" + key + "'");
    values_.emplace(std::move(key), std::move(value));
  }
}

RunConfig RunConfig::load(const std::filesystem::path& path, const std::set<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  return RunConfig(in, allowed);
}

void RunConfig::require(std::initializer_list<const char*> keys) const {
  for (const char* k : keys) {
    if (!has(k)) throw InputError(std::string("config: missing required key '") + k + "'");
  }
}

double RunConfig::get_double(const std::string& key) const {
  require({key.c_str()});
  return to_double(key, values_.at(key));
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::optional<std::size_t> RunConfig::get_size(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  const std::string& s = values_.at(key);
  std::size_t x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("config: '" + key + "' must be a nonnegative integer, got '" + s + "'");
  }
  return x;
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback) const {
  return get_size(key).value_or(fallback);
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = values_.at(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InputError("config: '" + key + "' must be true or false, got '" + s + "'");
}

std::string RunConfig::get_string(const std::string& key) const {
  require({key.c_str()});
  return values_.at(key);
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? values_.at(key) : fallback;
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<double> out;
  for (std::string_view item : split(raw)) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::string> RunConfig::get_words(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<std::string> out;
  for (std::string_view item : split(raw)) {
    if (item.empty()) throw InputError("config: empty entry in '" + key + "'");
    out.emplace_back(item);
  }
  return out;
}

}  // namespace occopt::cli
