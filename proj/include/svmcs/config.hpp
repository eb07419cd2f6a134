#pragma once

// Plain key = value configuration text. '#' starts a comment; blank lines are
// ignored; keys are case-sensitive and may appear once.

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "svmcs/error.hpp"

namespace svmcs {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        fail(errc::format_error, "config line " + std::to_string(line_no) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(errc::format_error, "config line " + std::to_string(line_no) + ": empty key");
      if (!cfg.values_.emplace(key, value).second)
        fail(errc::format_error, "config key '" + key + "' given twice");
    }
    return cfg;
  }

  static KeyValueConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
  }

  std::optional<double> get_double(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    try {
      std::size_t used = 0;
      const double d = std::stod(*v, &used);
      if (used == v->size() && std::isfinite(d)) return d;
    } catch (const std::exception&) {
    }
    fail(errc::invalid_argument, "config key '" + key + "' is not a number: " + *v);
  }

  std::optional<std::uint64_t> get_count(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    try {
      std::size_t used = 0;
      const unsigned long long n = std::stoull(*v, &used);
      if (used == v->size() && (*v)[0] != '-') return n;
    } catch (const std::exception&) {
    }
    fail(errc::invalid_argument, "config key '" + key + "' is not a nonnegative integer: " + *v);
  }

  std::optional<std::vector<double>> get_list(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    std::istringstream in(*v);
    std::string cell;
    while (std::getline(in, cell, ',')) {
      cell = trim(cell);
      try {
        std::size_t used = 0;
        out.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(errc::invalid_argument, "config key '" + key + "' has a bad list entry: " + cell);
      }
    }
    return out;
  }

  // Keys present in the text but never read.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace svmcs
