#pragma once

// Exception hierarchy shared by every causalmk component.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace causalmk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with the model itself: build-time validation and references.
class ModelError : public Error {
 public:
  using Error::Error;
};

class CycleError : public ModelError {
 public:
  CycleError(const std::string& message, std::vector<std::string> cycle)
      : ModelError(message), cycle_(std::move(cycle)) {}

  // Pair names along the cycle, first element repeated at the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class RangeError : public ModelError {
 public:
  using ModelError::ModelError;
};

class DanglingRefError : public ModelError {
 public:
  using ModelError::ModelError;
};

// Duplicate names, overlapping exogenous/endogenous sets, repeated targets.
class DeclarationError : public ModelError {
 public:
  using ModelError::ModelError;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class NestedInterventionError : public Error {
 public:
  using Error::Error;
};

// Raised when an exhaustive search would exceed the configured caps.
// The answer is unknown, never "false".
class SearchBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ModelFileError : public Error {
 public:
  ModelFileError(const std::string& message, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace causalmk
