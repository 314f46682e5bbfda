#include "grj/error.hpp"

namespace grj {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotComplementary: return "NotComplementary";
    case ErrorKind::SingularAt: return "SingularAt";
    case ErrorKind::ContourTooWide: return "ContourTooWide";
    case ErrorKind::NoUnitRoot: return "NoUnitRoot";
    case ErrorKind::NotI1: return "NotI1";
    case ErrorKind::NotI2: return "NotI2";
    case ErrorKind::NotProjection: return "NotProjection";
    case ErrorKind::ClassMismatch: return "ClassMismatch";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace grj
