#include "spiralctl/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "spiralctl/errors.hpp"

namespace spiralctl::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

bool Config::contains(std::string_view key) const { return values_.find(key) != values_.end(); }

void Config::override_existing(std::string_view key, std::string value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second = std::move(value);
}

const std::string& Config::raw(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + std::string(key) + "'");
  return it->second;
}

double Config::number(std::string_view key) const { return parse_number(raw(key), key); }

std::size_t Config::count(std::string_view key) const {
  const double v = number(key);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e12)
    throw ConfigError("config key '" + std::string(key) + "' must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool Config::flag(std::string_view key) const { return parse_flag(raw(key), key); }

std::string Config::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

Config parse(std::string_view text) {
  Config cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    cfg.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return cfg;
}

std::pair<std::string, std::string> split_assignment(std::string_view arg) {
  const auto eq = arg.find('=');
  if (eq == std::string_view::npos || trim(arg.substr(0, eq)).empty())
    throw ConfigError("override '" + std::string(arg) + "' is not of the form key=value");
  return {std::string(trim(arg.substr(0, eq))), std::string(trim(arg.substr(eq + 1)))};
}

double parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("'" + std::string(what) + "': cannot parse '" + std::string(s) + "' as a number");
  return v;
}

bool parse_flag(std::string_view s, std::string_view what) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("'" + std::string(what) + "': expected true or false, got '" + std::string(s) + "'");
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericalError("format_number: conversion failed");
  return {buf, ptr};
}

}  // namespace spiralctl::config
