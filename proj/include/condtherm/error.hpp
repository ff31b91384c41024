#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace condtherm {

enum class ErrorCode {
  NonPositiveGibbsWeight,
  NotNormalized,
  ZeroTotalMass,
  DimensionMismatch,
  OutOfRange,
  MassMismatch,
  EmptyInput,
  NumericBreakdown,
  NotThermoMajorizing,
  DegenerateSource,
  DegenerateCertificate,
  DimensionTooLarge,
  NotConvertible,
  NotStochasticSum,
  ParseError,
  ValidationError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveGibbsWeight: return "NonPositiveGibbsWeight";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ZeroTotalMass: return "ZeroTotalMass";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NumericBreakdown: return "NumericBreakdown";
    case ErrorCode::NotThermoMajorizing: return "NotThermoMajorizing";
    case ErrorCode::DegenerateSource: return "DegenerateSource";
    case ErrorCode::DegenerateCertificate: return "DegenerateCertificate";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::NotConvertible: return "NotConvertible";
    case ErrorCode::NotStochasticSum: return "NotStochasticSum";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace condtherm
