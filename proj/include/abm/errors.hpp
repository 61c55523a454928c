#pragma once

#include <stdexcept>
#include <string>

namespace abm {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model or function parameters (out-of-range knobs, bad lag ranges).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed, inconsistent or degenerate input data (CSV rows, constant
/// series, missing bull/bear days, series too short for the requested split).
class DataError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateSeriesError : public DataError {
 public:
  using DataError::DataError;
};

/// Process exit codes used by the CLI. Data and parameter problems are
/// distinguishable by scripts driving reproduction pipelines.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParameterError = 2,
  kExitDataError = 3,
  kExitFitError = 4,
};

}  // namespace abm
