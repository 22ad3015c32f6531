#include "frk/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace frk {

namespace {

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected 'key = value' at line " + std::to_string(lineno));
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key at line " + std::to_string(lineno));
    if (cfg.entries_.count(key)) {
      throw ConfigError("config: duplicate key '" + key + "' at line " + std::to_string(lineno));
    }
    cfg.entries_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

std::string Config::require_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end() || it->second.empty()) {
    throw ConfigError("config: missing required key '" + key + "'");
  }
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

namespace {

double parse_real(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw ConfigError("config: key '" + key + "' is not a number: '" + v + "'");
  }
  return x;
}

long parse_int(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw ConfigError("config: key '" + key + "' is not an integer: '" + v + "'");
  }
  return x;
}

}  // namespace

double Config::require_real(const std::string& key) const {
  return parse_real(require_string(key), key);
}

double Config::get_real(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_real(it->second, key);
}

long Config::require_int(const std::string& key) const {
  return parse_int(require_string(key), key);
}

long Config::get_int(const std::string& key, long fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_int(it->second, key);
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(it->second.c_str(), &end, 10);
  if (it->second.empty() || end != it->second.c_str() + it->second.size()) {
    throw ConfigError("config: key '" + key + "' is not an unsigned integer: '" + it->second + "'");
  }
  return x;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> Config::get_strings(const std::string& key) const {
  auto it = entries_.find(key);
  std::vector<std::string> out;
  if (it == entries_.end()) return out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<double> Config::require_reals(const std::string& key) const {
  require_string(key);
  std::vector<double> out;
  for (const auto& s : get_strings(key)) out.push_back(parse_real(s, key));
  if (out.empty()) throw ConfigError("config: key '" + key + "' has no values");
  return out;
}

std::vector<long> Config::require_ints(const std::string& key) const {
  require_string(key);
  std::vector<long> out;
  for (const auto& s : get_strings(key)) out.push_back(parse_int(s, key));
  if (out.empty()) throw ConfigError("config: key '" + key + "' has no values");
  return out;
}

void Config::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : entries_) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
}

}  // namespace frk
