#pragma once

#include <stdexcept>
#include <string>

namespace balaw {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures: exit code 3 in the CLI.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotInDomain : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotStrictlyHyperbolic : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LeftDomain : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DomainTooLarge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BlowupGuard : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DomainExit : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownPreset : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownSuite : public Error {
 public:
  using Error::Error;
};

}  // namespace balaw
