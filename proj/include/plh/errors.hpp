#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plh {

/// A documented precondition of an operation was violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A simplex, vertex or stalk was requested that does not exist.
class LookupError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Input would exceed a configured resource budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Floating-point elimination produced entries beyond the trust threshold.
/// Callers are expected to retry with the exact carrier.
class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; `line()` is 1-based, 0 when not line oriented.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace plh
