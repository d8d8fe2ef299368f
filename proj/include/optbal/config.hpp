#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "optbal/errors.hpp"

namespace optbal {

/// Flat "key = value" configuration with '#' comments.  Values are kept as
/// strings; typed access validates on demand and reports the offending key
/// (and source line where available).
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static Config parse(std::istream& in, const std::string& origin = "<stream>") {
    Config cfg;
    cfg.origin_ = origin;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected \"key = value\", got \"" + trimmed + "\"",
                          line_no);
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key", line_no);
      cfg.entries_[key] = Entry{value, line_no};
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
    return parse(in, path);
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get_string(const std::string& key) const { return require(key).value; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  double get_real(const std::string& key) const { return to_real(key, require(key)); }

  double get_real(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : to_real(key, it->second);
  }

  long get_int(const std::string& key) const { return to_int(key, require(key)); }

  long get_int(const std::string& key, long fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : to_int(key, it->second);
  }

  std::vector<double> get_real_list(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError(location(e) + ": key \"" + key + "\": invalid number \"" + tok + "\"",
                          e.line);
      }
    }
    if (out.empty())
      throw ConfigError(location(e) + ": key \"" + key + "\" has an empty list", e.line);
    return out;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  const Entry& require(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw ConfigError(origin_ + ": missing required key \"" + key + "\"");
    return it->second;
  }

  double to_real(const std::string& key, const Entry& e) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument(e.value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(location(e) + ": key \"" + key + "\": invalid real \"" + e.value + "\"",
                        e.line);
    }
  }

  long to_int(const std::string& key, const Entry& e) const {
    try {
      std::size_t pos = 0;
      const long v = std::stol(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument(e.value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(location(e) + ": key \"" + key + "\": invalid integer \"" + e.value +
                            "\"",
                        e.line);
    }
  }

  std::string location(const Entry& e) const { return origin_ + ":" + std::to_string(e.line); }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, Entry> entries_;
  std::string origin_;
};

}  // namespace optbal
