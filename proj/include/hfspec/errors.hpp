#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfspec {

// Argument outside the mathematical domain of an operation (non-half-integer
// spin, non-positive linewidth, empty sample, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller violated a documented precondition (non-Hermitian input to eigh,
// unnormalized state vector, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unknown registry key.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed or schema-violating input file. `line()` is 1-based, 0 if the
// error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hfspec
