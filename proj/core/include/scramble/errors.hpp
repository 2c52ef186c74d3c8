#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace scramble {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or input violates an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An eigensolver, integrator or estimator failed numerically.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An iterative estimate did not settle; carries the running estimates.
class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> trace)
      : NumericalError(what), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Malformed or unknown configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace scramble
