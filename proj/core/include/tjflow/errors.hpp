#pragma once

#include <stdexcept>
#include <string>

namespace tjflow {

enum class ErrorCode {
  TensionsDegenerate,
  NotOnBoundary,
  SingularGradient,
  NoIntersection,
  OffsetMissesBoundary,
  DegenerateMetric,
  MatrixMNotInvertible,
  SingularJacobian,
  NoConvergence,
  EigenSolveFailed,
  ZeroFunction,
  CompatibilityFailed,
  CflViolation,
  NewtonDiverged,
  DegenerateCurve,
  NonPositiveSeries,
  ParseError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorCode code);

// True for codes that describe bad input rather than a numerical failure.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tjflow
