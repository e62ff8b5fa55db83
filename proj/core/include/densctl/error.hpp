#pragma once

#include <stdexcept>
#include <string>

namespace densctl {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments violate an operation's precondition (mesh mismatch, bad parameter).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A strict synthesis was requested for an infeasible leader mass.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// The simulation hit NaN/Inf, negative density or a near-vacuum leader density.
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace densctl
