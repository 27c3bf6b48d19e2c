#pragma once

#include <stdexcept>

namespace kgbench {

// Invalid user configuration (bad flag values, out-of-range hyperparameters).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A relation cannot be evaluated for one run (e.g. single-class examples).
class UnevaluableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kgbench
