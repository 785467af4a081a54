#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stagger {

// Root of every error the library throws. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch between two operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input outside the domain of an operation (empty vector, empty title, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Index or span outside its valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable or missing input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed dataset line; carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : DataError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Non-finite loss or gradient. `tensor()` names the offending parameter when
// one is known.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::string tensor = {})
      : Error(what), tensor_(std::move(tensor)) {}

  const std::string& tensor() const { return tensor_; }

 private:
  std::string tensor_;
};

}  // namespace stagger
