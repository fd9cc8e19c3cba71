#pragma once

#include <stdexcept>
#include <string>

namespace prs {

/// Raised when an algorithm fails to reach its tolerance (quadrature,
/// time integration, curve fitting).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid user configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace prs
