// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace framing {

/// Flat `key = value` text. Blank lines and lines starting with '#' are
/// ignored; later keys override earlier ones.
class KeyValues {
 public:
  static KeyValues parse(std::istream& in, const std::string& source = "<input>");
  static KeyValues load(const std::filesystem::path& path);
  /// One `key = value` line per entry, keys sorted; parse() reads it back.
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;

  /// Throws ConfigError listing keys outside `known`.
  void require_known(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Comma-separated list, entries trimmed, empty entries dropped.
std::vector<std::string> split_list(const std::string& text);
std::string trim(std::string_view text);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace framing
