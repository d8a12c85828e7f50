#pragma once

#include <stdexcept>
#include <string>

namespace pw {

enum class ErrorCode {
  DuplicateVertex,
  UnknownEndpoint,
  DuplicateEdge,
  UnknownVertex,
  CyclicGraph,
  NotLatent,
  LatentNotExogenous,
  NotExoSimplicial,
  WeightSumNotOne,
  VariableMismatch,
  ZeroProbabilityEvidence,
  IncompleteTable,
  NotABijection,
  OrbitTooLarge,
  EmptySupport,
  CardinalityMismatch,
  NonBooleanVisible,
  EnumerationBudgetExceeded,
  ParseError,
  UsageError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pw
