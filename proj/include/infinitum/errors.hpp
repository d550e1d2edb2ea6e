#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infinitum {

enum class ErrorCode {
  DimensionMismatch,
  SphereOnlyField,
  ZeroField,
  InvalidField,
  InvalidPartition,
  Discontinuous,
  NonFiniteInput,
  NotOnSphere,
  EquatorPoint,
  NorthPole,
  DeltaOutOfRange,
  InvalidRegularizer,
  AnchorVanishes,
  PreconditionNonNull,
  OmegaDiverged,
  NotLure,
  ZeroNormal,
  NotNormalized,
  StepFailure,
  NonConvergence,
  MalformedInput,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception; `code()` tells
// callers (and the CLI exit-status mapping) which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace infinitum
