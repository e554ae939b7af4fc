#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shipid {

enum class ErrorKind {
  kDegenerateParameters,
  kIntegrationBlowup,
  kParse,
  kInsufficientData,
  kUnidentifiable,
  kValidation,
  kIo,
  kSolver,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown when a rollout produces a non-finite state. step() is the index of
/// the step that failed (0-based), or 0 for a single rk4_step.
class IntegrationBlowup : public Error {
 public:
  IntegrationBlowup(std::size_t step, const std::string& what)
      : Error(ErrorKind::kIntegrationBlowup, what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// CSV/JSON parse failure. row() is the 1-based data row (0 = header/file level).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error(ErrorKind::kParse, what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace shipid
