#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace occopt::cli {

/// Flat `key = value` configuration. Keys outside the allowed set are rejected
/// at load time; every accessor throws InputError on a missing or malformed value.
class RunConfig {
 public:
  RunConfig(std::istream& in, const std::set<std::string>& allowed);
  static RunConfig load(const std::filesystem::path& path, const std::set<std::string>& allowed);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::optional<std::size_t> get_size(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  /// Comma-separated finite numbers.
  std::vector<double> get_list(const std::string& key) const;
  /// Comma-separated words.
  std::vector<std::string> get_words(const std::string& key) const;

  /// Throws InputError naming the first absent key.
  void require(std::initializer_list<const char*> keys) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace occopt::cli
