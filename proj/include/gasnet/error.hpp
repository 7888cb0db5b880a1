#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gasnet {

enum class ErrorCode {
  NonPositivePressure,
  NonPositiveDensity,
  NonPositiveFlux,
  NotSubsonic,
  SubsonicViolation,
  VacuumFormation,
  NoConvergence,
  SingularEntropyMix,
  SingularJacobian,
  EventStarvation,
  InvalidArgument,
  ParseError,
  ValidationError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositivePressure: return "NonPositivePressure";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::NonPositiveFlux: return "NonPositiveFlux";
    case ErrorCode::NotSubsonic: return "NotSubsonic";
    case ErrorCode::SubsonicViolation: return "SubsonicViolation";
    case ErrorCode::VacuumFormation: return "VacuumFormation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularEntropyMix: return "SingularEntropyMix";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::EventStarvation: return "EventStarvation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace gasnet
