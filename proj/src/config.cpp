#include "portnav/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace portnav {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

Config::Value parse_value(const std::string& raw, int line_no) {
  if (raw.empty()) {
    throw ConfigError("empty value at line " + std::to_string(line_no));
  }
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      throw ConfigError("unterminated string at line " + std::to_string(line_no));
    }
    return raw.substr(1, raw.size() - 2);
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  const bool looks_float = raw.find_first_of(".eE") != std::string::npos ||
                           raw == "inf" || raw == "-inf";
  try {
    std::size_t used = 0;
    if (!looks_float) {
      const std::int64_t i = std::stoll(raw, &used);
      if (used == raw.size()) return i;
    }
    const double d = std::stod(raw, &used);
    if (used == raw.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot parse value '" + raw + "' at line " + std::to_string(line_no));
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments outside of quotes.
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quote = !in_quote;
      if (line[i] == '#' && !in_quote) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("malformed section header at line " + std::to_string(line_no));
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError("empty section name at line " + std::to_string(line_no));
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key = value at line " + std::to_string(line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("empty key at line " + std::to_string(line_no));
    }
    cfg.sections_[section][key] = parse_value(value, line_no);
  }
  return cfg;
}

const Config::Value* Config::find(const std::string& section, const std::string& key) const {
  const auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const Value* v = find(section, key);
  if (!v) return fallback;
  if (const bool* b = std::get_if<bool>(v)) return *b;
  throw ConfigError(section + "." + key + " is not a bool");
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
  const Value* v = find(section, key);
  if (!v) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
  throw ConfigError(section + "." + key + " is not an integer");
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  const Value* v = find(section, key);
  if (!v) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(v)) return *d;
  throw ConfigError(section + "." + key + " is not a number");
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const Value* v = find(section, key);
  if (!v) return fallback;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  throw ConfigError(section + "." + key + " is not a string");
}

void Config::set(const std::string& section, const std::string& key, Value v) {
  sections_[section][key] = std::move(v);
}

nlohmann::json Config::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, entries] : sections_) {
    nlohmann::json sec = nlohmann::json::object();
    for (const auto& [key, value] : entries) {
      std::visit([&](const auto& v) { sec[key] = v; }, value);
    }
    out[name] = std::move(sec);
  }
  return out;
}

}  // namespace portnav
