#pragma once

#include <stdexcept>
#include <string>

namespace gadi {

/// Caller broke an operation contract (dimension mismatch, bad parameter).
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParameterError : ContractViolation {
  using ContractViolation::ContractViolation;
};

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A pivot fell below the normal range of the working format; the matrix is
/// effectively singular at that precision.
struct SingularInPrecision : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OverflowDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IterationLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergentAlpha : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gadi
