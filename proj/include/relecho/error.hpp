#pragma once
#include <stdexcept>
#include <string>

namespace relecho {

// Failure categories. Validation failures are config/shape problems detected
// before any numerics run; the rest are numerical guards raised mid-pipeline.
enum class ErrorCode {
  Validation,
  GridTooSmall,
  GridTooCoarse,
  GridMismatch,
  TruncationTooLarge,
  EmptyTruncation,
  MemoryCeiling,
  BoundaryFluxTooLarge,
  StabilityViolation,
  WeightSumViolation,
  FitFailure,
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::TruncationTooLarge: return "TruncationTooLarge";
    case ErrorCode::EmptyTruncation: return "EmptyTruncation";
    case ErrorCode::MemoryCeiling: return "MemoryCeiling";
    case ErrorCode::BoundaryFluxTooLarge: return "BoundaryFluxTooLarge";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::WeightSumViolation: return "WeightSumViolation";
    case ErrorCode::FitFailure: return "FitFailure";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace relecho
