#pragma once

#include <stdexcept>
#include <string>

namespace misanthrope {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural problem with a rate model (empty table, negative rate, bad r-spec).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Ratios of the rate table disagree along two recursion paths.
class ConsistencyError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Argument outside the numeric domain (theta outside the tilt domain, density not attainable).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The one-site partition function does not converge within the window growth limit.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Requested Burgers time is past the allowed fraction of the shock time.
class HorizonError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Canonical sector is empty or otherwise unusable.
class SectorError : public Error {
 public:
  using Error::Error;
};

}  // namespace misanthrope
