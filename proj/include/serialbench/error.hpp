#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace serialbench {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed object graph: dangling ids, wrong arity, cycles.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Arguments or inputs that violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A request that would exceed a configured size budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Text input that could not be parsed; line is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace serialbench
