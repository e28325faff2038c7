#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lookahead {

/// Base class of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose layer names, order or shapes disagree.
class ConformabilityError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An inconsistent or incomplete configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared in an iterate.
class DivergenceError : public Error {
 public:
  DivergenceError(std::int64_t iteration, const std::string& what)
      : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::int64_t iteration() const noexcept { return iteration_; }

 private:
  std::int64_t iteration_;
};

}  // namespace lookahead
