#include "scvx/penalty.hpp"

#include "scvx/error.hpp"

namespace scvx {

const char* to_string(PenaltyMode mode) { return mode == PenaltyMode::equality ? "equality" : "penalty"; }

const char* to_string(PenaltyCheck::Status status) {
  switch (status) {
    case PenaltyCheck::Status::valid: return "valid";
    case PenaltyCheck::Status::invalid: return "invalid";
    case PenaltyCheck::Status::not_applicable: return "not-applicable";
  }
  return "unknown";
}

void PenaltyConfig::validate(const OptimalControlProblem& problem) const {
  if (!(lambda >= 0.0)) throw ScvxError(ErrorCode::invalid_argument, "penalty weight must be nonnegative");
  if (mode == PenaltyMode::equality && !problem.dynamics_affine())
    throw ScvxError(ErrorCode::unsupported_model, "equality mode requires affine dynamics");
}

PenaltyConfig PenaltyConfig::default_for(const OptimalControlProblem& problem, double lambda) {
  return {lambda, problem.dynamics_affine() ? PenaltyMode::equality : PenaltyMode::penalty};
}

double penalty_value(const OptimalControlProblem& problem, const PenaltyConfig& config, const Eigen::VectorXd& y) {
  const double J = problem.objective_value({y.data(), static_cast<std::size_t>(y.size())});
  if (config.lambda == 0.0) return J;
  return J + config.lambda * eval_g(problem, y).lpNorm<1>();
}

PenaltyCheck validate_penalty_weight(const PenaltyConfig& config, const Eigen::VectorXd& multipliers) {
  PenaltyCheck out;
  if (config.mode == PenaltyMode::equality) return out;
  out.required_lambda = multipliers.size() == 0 ? 0.0 : multipliers.lpNorm<Eigen::Infinity>();
  out.status = config.lambda >= out.required_lambda ? PenaltyCheck::Status::valid : PenaltyCheck::Status::invalid;
  return out;
}

}  // namespace scvx
