#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blat {

/// Failure categories raised by the library. Each error also carries a
/// subject naming the offending field, matrix, ticker or line.
enum class ErrorCode {
  NotPositiveDefinite,
  OutOfRange,
  ShapeMismatch,
  SingularMatrix,
  NonInvertible,
  InvalidDof,
  InvalidDelta,
  NoRoot,
  SamplerFailure,
  InsufficientData,
  InsufficientHistory,
  SingularDesign,
  ZeroVariance,
  ParseError,
  InvariantViolation,
  EmptyUniverse,
  Bankrupt,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string subject_;
  std::string detail_;
};

}  // namespace blat
