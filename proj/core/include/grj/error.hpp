#pragma once

#include <stdexcept>
#include <string>

namespace grj {

enum class ErrorKind {
  InvalidInput,
  NotComplementary,
  SingularAt,
  ContourTooWide,
  NoUnitRoot,
  NotI1,
  NotI2,
  NotProjection,
  ClassMismatch,
  InvariantViolation,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells the failure apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace grj
