#pragma once

// Exact penalty P(y) = J(y) + lambda ||g(y)||_1 for the dynamics defects.

#include <Eigen/Dense>

#include "scvx/problem.hpp"

namespace scvx {

enum class PenaltyMode {
  equality,  // g(y) = 0 kept as constraints; requires affine dynamics
  penalty,   // g(y) >= 0 relaxed, lambda ||g||_1 added to the objective
};

const char* to_string(PenaltyMode mode);

struct PenaltyConfig {
  double lambda = 0.0;
  PenaltyMode mode = PenaltyMode::equality;

  /// Throws ScvxError(invalid_argument) for lambda < 0 and
  /// ScvxError(unsupported_model) for equality mode with non-affine dynamics.
  void validate(const OptimalControlProblem& problem) const;
  /// Equality mode for affine dynamics, penalty mode otherwise.
  static PenaltyConfig default_for(const OptimalControlProblem& problem, double lambda = 0.0);
};

double penalty_value(const OptimalControlProblem& problem, const PenaltyConfig& config, const Eigen::VectorXd& y);

struct PenaltyCheck {
  enum class Status { valid, invalid, not_applicable };
  Status status = Status::not_applicable;
  double required_lambda = 0.0;  // ||mu||_inf
};

const char* to_string(PenaltyCheck::Status status);

/// valid iff lambda >= max_j |mu_j|; equality mode is not applicable.
PenaltyCheck validate_penalty_weight(const PenaltyConfig& config, const Eigen::VectorXd& multipliers);

}  // namespace scvx
