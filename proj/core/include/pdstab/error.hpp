#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdstab {

enum class ErrorCode {
  ComplexEigenvalues,
  VanishingSpeed,
  DefectiveMatrix,
  Singular,
  DimensionMismatch,
  NonFinite,
  A0NotSPD,
  BlockCouplingTooLarge,
  SNotInvertible,
  NonPositiveAlpha,
  BlowUp,
  SpectralFailure,
  NonPDWeight,
  InsufficientSamples,
  NonPositiveEnergy,
  InvalidParameters,
  DryBed,
  AssumptionViolated,
  SingularFeedback,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pdstab
