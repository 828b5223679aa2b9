#include "likertopt/error.hpp"

namespace likertopt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyBox: return "EmptyBox";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::OutOfRangeLikert: return "OutOfRangeLikert";
    case ErrorCode::OutOfRangeCertainty: return "OutOfRangeCertainty";
    case ErrorCode::DuplicateLikert: return "DuplicateLikert";
    case ErrorCode::MixedSigns: return "MixedSigns";
    case ErrorCode::NotContiguous: return "NotContiguous";
    case ErrorCode::CertaintyFourNotSingleton: return "CertaintyFourNotSingleton";
    case ErrorCode::BadTolerances: return "BadTolerances";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::EmptySampleList: return "EmptySampleList";
    case ErrorCode::InfeasibleRegion: return "InfeasibleRegion";
    case ErrorCode::UnknownQuery: return "UnknownQuery";
    case ErrorCode::InvalidOutcomeSet: return "InvalidOutcomeSet";
    case ErrorCode::WrongPhase: return "WrongPhase";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

}  // namespace likertopt
