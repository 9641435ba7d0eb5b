#pragma once

#include <stdexcept>
#include <string>

namespace kwl {

/// Error codes for every contract violation the library reports.
enum class ErrorCode {
  InvalidParameter,
  NonPositiveCap,
  ThresholdOrder,
  BoxTooSmall,
  LambdaBelowThreshold,
  ZeroOffset,
  DegenerateThreshold,
  SpectrumTooShort,
  DefiniteCase,
  LambdaBelowLambda0,
  SubspaceMismatch,
  SeedZero,
  NoCrossing,
  EndpointNotBelowZero,
  MaxItersExceeded,
  GeometryViolated,
  GammaBelowOne,
  BadExponent,
  PsBoundViolated,
  TrivialSolution,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace kwl
