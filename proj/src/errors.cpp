#include "infinitum/errors.hpp"

namespace infinitum {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SphereOnlyField: return "SphereOnlyField";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::Discontinuous: return "Discontinuous";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NotOnSphere: return "NotOnSphere";
    case ErrorCode::EquatorPoint: return "EquatorPoint";
    case ErrorCode::NorthPole: return "NorthPole";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::InvalidRegularizer: return "InvalidRegularizer";
    case ErrorCode::AnchorVanishes: return "AnchorVanishes";
    case ErrorCode::PreconditionNonNull: return "PreconditionNonNull";
    case ErrorCode::OmegaDiverged: return "OmegaDiverged";
    case ErrorCode::NotLure: return "NotLure";
    case ErrorCode::ZeroNormal: return "ZeroNormal";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace infinitum
