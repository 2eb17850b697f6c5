#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mts {

// Bad command-line usage. Maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or semantically invalid input (problem files, checkpoints,
// node payloads). Maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
  InputError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  // 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

// A run could not complete (worker failure, traversal guard tripped).
// Maps to exit code 3.
class AbortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mts
