#include "pdstab/error.hpp"

namespace pdstab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ComplexEigenvalues: return "ComplexEigenvalues";
    case ErrorCode::VanishingSpeed: return "VanishingSpeed";
    case ErrorCode::DefectiveMatrix: return "DefectiveMatrix";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::A0NotSPD: return "A0NotSPD";
    case ErrorCode::BlockCouplingTooLarge: return "BlockCouplingTooLarge";
    case ErrorCode::SNotInvertible: return "SNotInvertible";
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::SpectralFailure: return "SpectralFailure";
    case ErrorCode::NonPDWeight: return "NonPDWeight";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NonPositiveEnergy: return "NonPositiveEnergy";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::DryBed: return "DryBed";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::SingularFeedback: return "SingularFeedback";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace pdstab
