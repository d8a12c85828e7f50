#include "pw/errors.hpp"

namespace pw {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateVertex: return "DuplicateVertex";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::NotLatent: return "NotLatent";
    case ErrorCode::LatentNotExogenous: return "LatentNotExogenous";
    case ErrorCode::NotExoSimplicial: return "NotExoSimplicial";
    case ErrorCode::WeightSumNotOne: return "WeightSumNotOne";
    case ErrorCode::VariableMismatch: return "VariableMismatch";
    case ErrorCode::ZeroProbabilityEvidence: return "ZeroProbabilityEvidence";
    case ErrorCode::IncompleteTable: return "IncompleteTable";
    case ErrorCode::NotABijection: return "NotABijection";
    case ErrorCode::OrbitTooLarge: return "OrbitTooLarge";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::CardinalityMismatch: return "CardinalityMismatch";
    case ErrorCode::NonBooleanVisible: return "NonBooleanVisible";
    case ErrorCode::EnumerationBudgetExceeded:
      return "EnumerationBudgetExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Error";
}

}  // namespace pw
