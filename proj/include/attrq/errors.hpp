#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace attrq {

/// Malformed or inconsistent model input (syntax, unknown names, bad levels).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or semantic error located at a line of a model file.
class ParseError : public ModelError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ModelError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A state space, reachable set or exploration exceeded a configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear system that theory says is invertible turned out singular.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace attrq
