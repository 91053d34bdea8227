#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hardy_rellich {

enum class ErrorCode {
  InvalidArgument,
  DimensionTooSmall,
  EmptyLambda,
  NotInSpectrum,
  DomainMismatch,
  NegativeInput,
  InvalidAngle,
  ConvergenceFailure,
  QuadratureFailure,
  UnsupportedWeight,
  ZeroDenominator,
  NegativeRadicand,
  SelectionViolation,
  BoundaryClassViolation,
  EigensolveFailure,
  InvalidProfile,
};

inline std::string_view error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::EmptyLambda: return "EmptyLambda";
    case ErrorCode::NotInSpectrum: return "NotInSpectrum";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::UnsupportedWeight: return "UnsupportedWeight";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::SelectionViolation: return "SelectionViolation";
    case ErrorCode::BoundaryClassViolation: return "BoundaryClassViolation";
    case ErrorCode::EigensolveFailure: return "EigensolveFailure";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// One distinct type per code so callers can catch precisely.
template <ErrorCode C>
class ErrorOf : public Error {
 public:
  explicit ErrorOf(const std::string& what) : Error(C, what) {}
};

using InvalidArgument = ErrorOf<ErrorCode::InvalidArgument>;
using DimensionTooSmall = ErrorOf<ErrorCode::DimensionTooSmall>;
using EmptyLambda = ErrorOf<ErrorCode::EmptyLambda>;
using NotInSpectrum = ErrorOf<ErrorCode::NotInSpectrum>;
using DomainMismatch = ErrorOf<ErrorCode::DomainMismatch>;
using NegativeInput = ErrorOf<ErrorCode::NegativeInput>;
using InvalidAngle = ErrorOf<ErrorCode::InvalidAngle>;
using ConvergenceFailure = ErrorOf<ErrorCode::ConvergenceFailure>;
using QuadratureFailure = ErrorOf<ErrorCode::QuadratureFailure>;
using UnsupportedWeight = ErrorOf<ErrorCode::UnsupportedWeight>;
using ZeroDenominator = ErrorOf<ErrorCode::ZeroDenominator>;
using NegativeRadicand = ErrorOf<ErrorCode::NegativeRadicand>;
using SelectionViolation = ErrorOf<ErrorCode::SelectionViolation>;
using BoundaryClassViolation = ErrorOf<ErrorCode::BoundaryClassViolation>;
using EigensolveFailure = ErrorOf<ErrorCode::EigensolveFailure>;
using InvalidProfile = ErrorOf<ErrorCode::InvalidProfile>;

}  // namespace hardy_rellich
