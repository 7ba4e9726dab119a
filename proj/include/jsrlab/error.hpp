#ifndef JSRLAB_ERROR_HPP
#define JSRLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace jsrlab {

/// Broad failure classes. The CLI maps each to its own exit code.
enum class ErrorKind {
  config,
  numeric,
  budget,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Caller handed us something malformed (bad shape, bad index, bad config).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class InvalidWordError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ShapeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class EnumerationTooLargeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Something went wrong inside a computation (non-finite values, no convergence).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

class InfeasibleError : public NumericError {
 public:
  using NumericError::NumericError;
};

class UnboundedError : public NumericError {
 public:
  using NumericError::NumericError;
};

class OverflowError : public NumericError {
 public:
  using NumericError::NumericError;
};

class BudgetExceededError : public Error {
 public:
  explicit BudgetExceededError(const std::string& what) : Error(ErrorKind::budget, what) {}
};

}  // namespace jsrlab

#endif  // JSRLAB_ERROR_HPP
