#include "hnls/error.hpp"

namespace hnls {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kDomainTooShort: return "domain-too-short";
    case ErrorCode::kNotAWeight: return "not-a-weight";
    case ErrorCode::kAccuracy: return "accuracy";
    case ErrorCode::kResolution: return "resolution";
    case ErrorCode::kSingularOperator: return "singular-operator";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kBelowCutoff: return "below-cutoff";
    case ErrorCode::kCalibrationFailed: return "calibration-failed";
    case ErrorCode::kSplittingViolation: return "splitting-violation";
    case ErrorCode::kContractionFailure: return "contraction-failure";
    case ErrorCode::kIllConditionedBasis: return "ill-conditioned-basis";
    case ErrorCode::kStiffness: return "stiffness";
    case ErrorCode::kUndefinedFunctional: return "undefined-functional";
    case ErrorCode::kInvalidTestFunction: return "invalid-test";
    case ErrorCode::kNumericalDegeneracy: return "numerical-degeneracy";
    case ErrorCode::kConfigRejected: return "config-rejected";
    case ErrorCode::kTailContamination: return "tail-contamination";
    case ErrorCode::kUnconvergedRun: return "unconverged-run";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace hnls
