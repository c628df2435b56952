#pragma once

#include <stdexcept>
#include <string>

namespace spiralctl {

/// Invalid parameters, layouts or configuration keys. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Iteration budgets exhausted, CFL rejection, degenerate algebra. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spiralctl
