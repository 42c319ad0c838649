#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mobsense {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text or configuration. `offset` is a byte offset
/// into the offending source, `expected` a short hint such as "operand".
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset, std::string expected = {})
      : Error(message + " at offset " + std::to_string(offset) +
              (expected.empty() ? std::string{} : " (expected " + expected + ")")),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

// Bad scenario configuration (missing keys, wrong types, unreadable files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

// Division by zero, sqrt of a negative value, non-finite result.
class DomainError : public EvalError {
 public:
  using EvalError::EvalError;
};

class UnboundParameterError : public EvalError {
 public:
  explicit UnboundParameterError(const std::string& name)
      : EvalError("unbound parameter '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Evaluating a derivative at a kink of abs (sgn at zero).
class NonSmoothError : public EvalError {
 public:
  using EvalError::EvalError;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: rank deficiency, LP failure, non-convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InfeasibleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mobsense
