#pragma once

#include <stdexcept>
#include <string>

namespace roadflow {

/// Invalid configuration: bad dimensions, out-of-range parameters, malformed
/// config documents. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or degenerate input data (unparsable rows, empty series, ...).
/// Maps to CLI exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: singular matrices, diverging losses.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace roadflow
