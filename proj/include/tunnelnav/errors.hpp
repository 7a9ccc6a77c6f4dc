#pragma once

#include <stdexcept>
#include <string>

namespace tunnelnav {

enum class ErrorCode {
  DegenerateChart,
  UmbilicPoint,
  NotTangent,
  DegenerateProjection,
  CollinearInput,
  NonUniqueProjection,
  ProjectionOnBoundary,
  OffsetOutOfRange,
  StepUnderflow,
  VanishingField,
  NoHit,
  ScanRejected,
  PatchEscape,
  EmptyProfile,
  WellPosednessViolation,
  ActiveZoneViolation,
  EstimatorFailure,
  SurfaceContact,
  InvalidArgument,
  ConfigError,
};

const char* to_string(ErrorCode code);

/// Base error for every failure raised by the library. The code identifies
/// the violated precondition; the message carries the location.
class TunnelError : public std::runtime_error {
 public:
  TunnelError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tunnelnav
