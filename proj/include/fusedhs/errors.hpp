#pragma once

#include <stdexcept>
#include <string>

namespace fusedhs {

// Base of every error raised by the library. The CLI maps subclasses to
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A distribution or builder received a non-positive scale/shape/rate.
class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

// Cholesky factorization failed even after diagonal jitter escalation.
class NumericalSingularityError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration (missing required field, empty grid, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or degenerate input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// A posterior summary was requested from too few retained draws.
class InsufficientDrawsError : public Error {
 public:
  using Error::Error;
};

}  // namespace fusedhs
