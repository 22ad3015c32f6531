#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "frk/errors.hpp"

namespace frk {

// Flat key = value run configuration. One assignment per line, '#' starts a
// comment, values are untyped text until a typed getter is called. There is
// deliberately no nesting or programmability so that runs diff cleanly.
class Config {
 public:
  Config() = default;
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  // Typed getters; the require_* forms throw ConfigError when absent.
  std::string require_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double require_real(const std::string& key) const;
  double get_real(const std::string& key, double fallback) const;
  long require_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Comma-separated lists.
  std::vector<std::string> get_strings(const std::string& key) const;
  std::vector<double> require_reals(const std::string& key) const;
  std::vector<long> require_ints(const std::string& key) const;

  // Schema gate: every present key must be in `allowed`; unknown keys are
  // reported by name before any computation starts.
  void reject_unknown(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace frk
