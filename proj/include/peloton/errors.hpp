#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace peloton {

/// Malformed input file (bad header, bad cell). Carries the 1-based line
/// number when one applies, 0 otherwise.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A caller broke an API precondition (shape mismatch, index out of range).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid user-supplied arguments (k = 0, empty training set, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested entity key does not exist.
class LookupError : public std::out_of_range {
 public:
  explicit LookupError(const std::string& key)
      : std::out_of_range("unknown entity key: " + key), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace peloton
