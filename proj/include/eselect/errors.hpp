#pragma once

#include <stdexcept>
#include <string>

namespace eselect {

/// Invalid run configuration or unusable parameter combination (CLI exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Calibration window with zero variance: no usable scale can be estimated.
struct DegenerateScaleError : DataError {
  using DataError::DataError;
};

}  // namespace eselect
