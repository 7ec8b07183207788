#include "scvx/error.hpp"

namespace scvx {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::norm_singularity: return "norm-singularity";
    case ErrorCode::non_convex: return "non-convex";
    case ErrorCode::licq_violation: return "licq-violation";
    case ErrorCode::infeasible_anchor: return "infeasible-anchor";
    case ErrorCode::infeasible_scenario: return "infeasible-scenario";
    case ErrorCode::solver_failure: return "solver-failure";
    case ErrorCode::unsupported_model: return "unsupported-model";
  }
  return "unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& message, int index) {
  std::string out = std::string(to_string(code)) + ": " + message;
  if (index >= 0) out += " (index " + std::to_string(index) + ")";
  return out;
}

}  // namespace

ScvxError::ScvxError(ErrorCode code, const std::string& message, int index)
    : std::runtime_error(compose(code, message, index)), code_(code), index_(index) {}

}  // namespace scvx
