#include "cgra/error.hpp"

namespace cgra {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DanglingPort: return "DanglingPort";
    case ErrorCode::DirectionMismatch: return "DirectionMismatch";
    case ErrorCode::UnreachableMemory: return "UnreachableMemory";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::CycleError: return "CycleError";
    case ErrorCode::BadDistance: return "BadDistance";
    case ErrorCode::OutOfBoundsAccess: return "OutOfBoundsAccess";
    case ErrorCode::BankOverflow: return "BankOverflow";
    case ErrorCode::MissingVariable: return "MissingVariable";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::MappingFailed: return "MappingFailed";
    case ErrorCode::ConfigOverflow: return "ConfigOverflow";
    case ErrorCode::XbarConflict: return "XbarConflict";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cgra
