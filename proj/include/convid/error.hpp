#pragma once

#include <stdexcept>
#include <string>

namespace convid {

/// Invalid input, malformed configuration or violated precondition.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation could not be completed (division by a vanishing
/// observable, overflow, large imaginary residual, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace convid
