#include "kwl/errors.hpp"

namespace kwl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NonPositiveCap: return "NonPositiveCap";
    case ErrorCode::ThresholdOrder: return "ThresholdOrder";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::LambdaBelowThreshold: return "LambdaBelowThreshold";
    case ErrorCode::ZeroOffset: return "ZeroOffset";
    case ErrorCode::DegenerateThreshold: return "DegenerateThreshold";
    case ErrorCode::SpectrumTooShort: return "SpectrumTooShort";
    case ErrorCode::DefiniteCase: return "DefiniteCase";
    case ErrorCode::LambdaBelowLambda0: return "LambdaBelowLambda0";
    case ErrorCode::SubspaceMismatch: return "SubspaceMismatch";
    case ErrorCode::SeedZero: return "SeedZero";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::EndpointNotBelowZero: return "EndpointNotBelowZero";
    case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::GeometryViolated: return "GeometryViolated";
    case ErrorCode::GammaBelowOne: return "GammaBelowOne";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::PsBoundViolated: return "PsBoundViolated";
    case ErrorCode::TrivialSolution: return "TrivialSolution";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace kwl
