#pragma once

#include <stdexcept>
#include <string>

namespace gcnet {

/// Invalid configuration, spec, or argument. Raised before any compute starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File access and container format problems.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, singularities, solver non-convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gcnet
