#pragma once

#include <stdexcept>
#include <string>

namespace markagg {

/// Failure categories. The CLI maps each one to an exit code via exit_code().
enum class Errc {
  // input validation
  kNegativeEntry,
  kRowSumViolation,
  kZeroRow,
  kNonFinite,
  kNotSquare,
  kEmptyClass,
  kNonPositivePi,
  kInvalidFixedSet,
  kBadTarget,
  kLambdaTooSmall,
  kParse,
  kDimensionMismatch,
  // computation
  kNotConverged,
  kNotRegular,
  kAbsoluteContinuityViolation,
  kAggregationMismatch,
  kTargetNotInStateList,
  // resource caps
  kTooLarge,
  kTooManySequences,
  kStateSpaceExceeded,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::kNegativeEntry: return "NegativeEntry";
    case Errc::kRowSumViolation: return "RowSumViolation";
    case Errc::kZeroRow: return "ZeroRow";
    case Errc::kNonFinite: return "NonFinite";
    case Errc::kNotSquare: return "NotSquare";
    case Errc::kEmptyClass: return "EmptyClass";
    case Errc::kNonPositivePi: return "NonPositivePi";
    case Errc::kInvalidFixedSet: return "InvalidFixedSet";
    case Errc::kBadTarget: return "BadTarget";
    case Errc::kLambdaTooSmall: return "LambdaTooSmall";
    case Errc::kParse: return "ParseError";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kNotConverged: return "NotConverged";
    case Errc::kNotRegular: return "NotRegular";
    case Errc::kAbsoluteContinuityViolation: return "AbsoluteContinuityViolation";
    case Errc::kAggregationMismatch: return "AggregationMismatch";
    case Errc::kTargetNotInStateList: return "TargetNotInStateList";
    case Errc::kTooLarge: return "TooLarge";
    case Errc::kTooManySequences: return "TooManySequences";
    case Errc::kStateSpaceExceeded: return "StateSpaceExceeded";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// 1 = computation error, 2 = input validation error, 3 = resource cap exceeded.
inline int exit_code(Errc c) {
  switch (c) {
    case Errc::kNotConverged:
    case Errc::kNotRegular:
    case Errc::kAbsoluteContinuityViolation:
    case Errc::kAggregationMismatch:
    case Errc::kTargetNotInStateList:
      return 1;
    case Errc::kTooLarge:
    case Errc::kTooManySequences:
    case Errc::kStateSpaceExceeded:
      return 3;
    default:
      return 2;
  }
}

}  // namespace markagg
