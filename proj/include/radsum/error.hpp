#pragma once

#include <stdexcept>
#include <string>

namespace radsum {

enum class ErrorKind {
  Parse,
  MissingField,
  DuplicateId,
  InvalidArgument,
  EmptyInput,
  Degenerate,
  IdMismatch,
  Io,
};

const char* to_string(ErrorKind kind);

// Data-level failure. The CLI maps every Error to exit code 2 except
// InvalidArgument raised while validating flags, which it maps to 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace radsum
