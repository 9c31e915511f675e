#pragma once

#include <stdexcept>
#include <string>

namespace gddim {

/// Base class for all errors raised by the library. The exit code is the
/// process status the command-line tool reports for this error class.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Invalid family parameter, negative variance, malformed input.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration value (schedule length, step counts, unknown keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or corrupt file (checkpoint magic/version/length, CSV).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss, moments or samples.
class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

}  // namespace gddim
