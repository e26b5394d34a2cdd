#include "blat/errors.hpp"

namespace blat {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NonInvertible: return "NonInvertibleError";
    case ErrorCode::InvalidDof: return "InvalidDof";
    case ErrorCode::InvalidDelta: return "InvalidDelta";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::SamplerFailure: return "SamplerFailure";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::EmptyUniverse: return "EmptyUniverse";
    case ErrorCode::Bankrupt: return "Bankrupt";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& subject, const std::string& detail) {
  std::string msg(to_string(code));
  msg += "(" + subject + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string subject, const std::string& detail)
    : std::runtime_error(compose(code, subject, detail)),
      code_(code),
      subject_(std::move(subject)),
      detail_(detail) {}

}  // namespace blat
