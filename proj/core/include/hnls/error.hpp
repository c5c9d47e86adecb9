#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hnls {

/// Failure categories raised by the library. Each maps onto one documented
/// error path of a public operation.
enum class ErrorCode {
  kInvalidInput,
  kDomainTooShort,
  kNotAWeight,
  kAccuracy,
  kResolution,
  kSingularOperator,
  kInsufficientData,
  kBelowCutoff,
  kCalibrationFailed,
  kSplittingViolation,
  kContractionFailure,
  kIllConditionedBasis,
  kStiffness,
  kUndefinedFunctional,
  kInvalidTestFunction,
  kNumericalDegeneracy,
  kConfigRejected,
  kTailContamination,
  kUnconvergedRun,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace hnls
