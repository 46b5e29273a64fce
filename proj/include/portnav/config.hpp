#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

namespace portnav {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// TOML-style key/value file with [section] headers. Supported value types:
// bool, integer, float, quoted string. '#' starts a comment. This is the
// single place all tunable defaults can be overridden; every output artifact
// echoes the effective config in its header.
class Config {
 public:
  using Value = std::variant<bool, std::int64_t, double, std::string>;

  Config() = default;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;

  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;

  void set(const std::string& section, const std::string& key, Value v);

  // Stable (sorted) JSON echo of all sections.
  nlohmann::json to_json() const;

 private:
  const Value* find(const std::string& section, const std::string& key) const;
  std::map<std::string, std::map<std::string, Value>> sections_;
};

}  // namespace portnav
