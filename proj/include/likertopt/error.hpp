#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace likertopt {

enum class ErrorCode {
  // problem-core
  DimensionMismatch,
  EmptyBox,
  NonFinite,
  OutOfBounds,
  // preference-model
  Empty,
  OutOfRangeLikert,
  OutOfRangeCertainty,
  DuplicateLikert,
  MixedSigns,
  NotContiguous,
  CertaintyFourNotSingleton,
  BadTolerances,
  // surrogate / qp
  IndexOutOfRange,
  EmptyGrid,
  Infeasible,
  NumericalBreakdown,
  // acquisition / global search
  EmptySampleList,
  InfeasibleRegion,
  // engine
  UnknownQuery,
  InvalidOutcomeSet,
  WrongPhase,
  BudgetExhausted,
  BadConfig,
  // benchmark / io
  UnknownFunction,
  SchemaError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (CLI, HTTP layer) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace likertopt
