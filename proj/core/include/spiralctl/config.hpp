#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spiralctl::config {

/// Flat `key = value` settings with dotted section prefixes. Keys keep sorted order so that
/// printing a config is deterministic.
class Config {
 public:
  Config() = default;

  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  [[nodiscard]] bool contains(std::string_view key) const;

  /// Replaces an existing key; throws ConfigError when the key is unknown.
  void override_existing(std::string_view key, std::string value);

  [[nodiscard]] const std::string& raw(std::string_view key) const;
  [[nodiscard]] double number(std::string_view key) const;
  [[nodiscard]] std::size_t count(std::string_view key) const;
  [[nodiscard]] bool flag(std::string_view key) const;

  [[nodiscard]] const std::map<std::string, std::string, std::less<>>& entries() const {
    return values_;
  }

  /// One `key = value` line per entry.
  [[nodiscard]] std::string dump() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
[[nodiscard]] Config parse(std::string_view text);

/// Splits `key=value` as given on the command line.
[[nodiscard]] std::pair<std::string, std::string> split_assignment(std::string_view arg);

/// Locale-independent decimal parse; the whole string must be consumed.
[[nodiscard]] double parse_number(std::string_view s, std::string_view what = "value");
[[nodiscard]] bool parse_flag(std::string_view s, std::string_view what = "value");

/// Shortest decimal string that parses back to the same double.
[[nodiscard]] std::string format_number(double v);

}  // namespace spiralctl::config
