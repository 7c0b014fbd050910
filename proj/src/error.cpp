#include "tfs/error.hpp"

namespace tfs {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InputError: return "INPUT_ERROR";
    case ErrorCode::BudgetError: return "BUDGET_ERROR";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::BadSolution: return "BAD_SOLUTION";
    case ErrorCode::AllTrialsFailed: return "ALL_TRIALS_FAILED";
    case ErrorCode::UniquenessViolation: return "UNIQUENESS_VIOLATION";
    case ErrorCode::MalformedAnswer: return "MALFORMED_ANSWER";
    case ErrorCode::StepBudgetExceeded: return "STEP_BUDGET_EXCEEDED";
    case ErrorCode::NoSolution: return "NO_SOLUTION";
    case ErrorCode::PreconditionViolation: return "PRECONDITION_VIOLATION";
    case ErrorCode::IterBudgetExceeded: return "ITER_BUDGET_EXCEEDED";
    case ErrorCode::NoBranchVerifies: return "NO_BRANCH_VERIFIES";
    case ErrorCode::NoCandidateVerifies: return "NO_CANDIDATE_VERIFIES";
    case ErrorCode::CaseExhaustion: return "CASE_EXHAUSTION";
    case ErrorCode::CapExceeded: return "CAP_EXCEEDED";
    case ErrorCode::Malformed: return "MALFORMED";
    case ErrorCode::ContractViolation: return "CONTRACT_VIOLATION";
  }
  return "UNKNOWN";
}

}  // namespace tfs
