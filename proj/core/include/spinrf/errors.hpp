#pragma once

#include <stdexcept>
#include <string>

namespace spinrf {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation
// (non-positive resonance frequency, negative input power, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Shapes or grids that do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Checkpoint or binary file that is truncated or fails its digest.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during training or a fit that did not converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Datasets that are empty or otherwise unusable for the requested operation.
class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinrf
