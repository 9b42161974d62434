#pragma once

#include <stdexcept>
#include <string>

namespace vexp {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the set where the operation is defined
/// (e.g. p0 >= p_minus for a scaled conjugate).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data: non-finite samples, negative weights, bad parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Operation needs a Torus grid but got a Box grid (or vice versa).
class ModeError : public Error {
 public:
  using Error::Error;
};

/// A parameter is outside an open interval required by a theorem statement.
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A structural invariant of an input object failed (e.g. a kernel with nonzero sphere mean).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Configuration error; `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace vexp
