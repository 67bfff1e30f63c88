#include "radsum/error.hpp"

namespace radsum {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::MissingField: return "missing-field";
    case ErrorKind::DuplicateId: return "duplicate-id";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::IdMismatch: return "id-mismatch";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace radsum
