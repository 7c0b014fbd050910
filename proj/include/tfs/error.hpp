#pragma once

#include <stdexcept>
#include <string>

namespace tfs {

enum class ErrorCode {
  InputError,
  BudgetError,
  ParseError,
  BadSolution,
  AllTrialsFailed,
  UniquenessViolation,
  MalformedAnswer,
  StepBudgetExceeded,
  NoSolution,
  PreconditionViolation,
  IterBudgetExceeded,
  NoBranchVerifies,
  NoCandidateVerifies,
  CaseExhaustion,
  CapExceeded,
  Malformed,
  ContractViolation,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tfs
