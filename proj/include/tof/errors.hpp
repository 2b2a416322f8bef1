#pragma once

#include <stdexcept>
#include <string>

namespace tof {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed config, invariant-violating operators, out-of-domain
// parameters. The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical failures the caller could not have ruled out up front. Exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NoFlowError : public NumericalError {
 public:
  NoFlowError() : NumericalError("no population flow: the detection probability is stationary") {}
  explicit NoFlowError(const std::string& what) : NumericalError(what) {}
};

class UndefinedBoundError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class WindowTooShortError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DomainTooSmallError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace tof
