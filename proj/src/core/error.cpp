#include "posefuse/error.hpp"

namespace posefuse {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::WrongKeypointCount: return "WrongKeypointCount";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::DegeneratePose: return "DegeneratePose";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::EmptyBank: return "EmptyBank";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::TooFewVectors: return "TooFewVectors";
    case ErrorCode::IndivisibleDim: return "IndivisibleDim";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CorruptPayload: return "CorruptPayload";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::OutOfFrame: return "OutOfFrame";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::StaleCache: return "StaleCache";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::Missing3D: return "Missing3D";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::WrongKeypointCount:
    case ErrorCode::NonFiniteCoordinate:
    case ErrorCode::ParseError:
    case ErrorCode::BadMagic:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::CorruptPayload:
      return 2;
    case ErrorCode::IoError:
      return 4;
    case ErrorCode::OutOfFrame:
      return 5;
    case ErrorCode::DivergenceDetected:
      return 6;
    default:
      return 3;
  }
}

}  // namespace posefuse
