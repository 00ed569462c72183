#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posefuse {

enum class ErrorCode {
  // pose-core
  WrongKeypointCount,
  NonFiniteCoordinate,
  DegeneratePose,
  // affine-align
  DegenerateConfiguration,
  EmptyBank,
  KTooLarge,
  // pq-index
  TooFewVectors,
  IndivisibleDim,
  EmptyInput,
  DimMismatch,
  EmptyIndex,
  BadMagic,
  UnsupportedVersion,
  CorruptPayload,
  // image-ops
  EmptySupport,
  OutOfFrame,
  // losses
  LayoutMismatch,
  OutOfRange,
  // toy-adversarial
  StaleCache,
  DivergenceDetected,
  // eval-metrics
  EmptySet,
  BadRange,
  Missing3D,
  // plumbing
  IdMismatch,
  ParseError,
  InvalidArgument,
  IoError,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Process exit status the CLI reports for an error of this kind:
/// 2 parse, 3 parameter, 4 I/O, 5 partial job failure, 6 divergence.
int exit_code_for(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace posefuse
