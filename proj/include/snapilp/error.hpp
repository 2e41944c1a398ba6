#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace snapilp {

// Malformed input text: carries the 1-based position of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed input that violates a semantic constraint (contradictory examples,
// undeclared predicates, invalid bias, empty example sets, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation exceeded a configured resource cap (derived-atom budget).
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace snapilp
