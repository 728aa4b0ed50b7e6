#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netclust {

/// Base of every error thrown by the library. The CLI maps the concrete
/// subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range caller input.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Input file could not be parsed; carries the 1-based offending line.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A quantity is mathematically undefined for the given input
/// (zero-volume conductance, zero-degree Laplacian row, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Degenerate data for an otherwise well-posed request (e.g. fewer distinct
/// points than requested k-means clusters).
class DegenerateInputError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Iterative solver failed, matrix singular, variance nonpositive.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration requested beyond its hard size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace netclust
