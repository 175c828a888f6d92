#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cgra {

enum class ErrorCode {
  SchemaError,
  DanglingPort,
  DirectionMismatch,
  UnreachableMemory,
  UnknownPreset,
  CycleError,
  BadDistance,
  OutOfBoundsAccess,
  BankOverflow,
  MissingVariable,
  NoPath,
  MappingFailed,
  ConfigOverflow,
  XbarConflict,
  IoError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure the toolchain reports goes through this type; `code()` is
// what callers (and the CLI's JSON error reports) branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cgra
