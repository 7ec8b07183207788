#pragma once

// Successive convexification: project, linearize, solve, repeat.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "scvx/conic.hpp"
#include "scvx/error.hpp"
#include "scvx/penalty.hpp"
#include "scvx/problem.hpp"

namespace scvx {

struct ScvxConfig {
  double epsilon = 1e-6;
  int max_successions = 50;
  PenaltyConfig penalty;
  SolverSettings solver;
  int threads = 1;  // projection workers
  /// Called with the 1-based solve index and each assembled subproblem.
  std::function<void(int, const ConicProgram&)> on_subproblem;

  /// Throws ScvxError(invalid_argument) unless epsilon > 0 and max_successions >= 1.
  void validate() const;
};

enum class ScvxStatus { converged, max_successions, failed };

const char* to_string(ScvxStatus status);

struct SubsolverStats {
  SolveStatus status = SolveStatus::numerical_error;
  int iterations = 0;
  double gap = 0.0;
  double solver_objective = 0.0;
  double penalty_value = 0.0;  // P at the subproblem minimizer
};

struct SolveReport {
  std::vector<Eigen::VectorXd> iterates;      // z^0 .. z^k (accepted)
  std::vector<double> penalty_values;         // P(z^k)
  std::vector<double> feasibility_margins;    // min_j q_j(z^k)
  std::vector<double> base_violations;        // Y membership violation of z^k
  std::vector<SubsolverStats> subsolver_stats;  // one per subproblem solve
  std::vector<double> solve_seconds;          // wall time per solve
  ScvxStatus status = ScvxStatus::failed;
  std::string failure_reason;
  int failed_solve = -1;                      // 1-based solve index
  int successions = 0;                        // accepted steps k
  double fixed_point_residual = 0.0;          // P(z*) - Phi(z*), NaN unless converged
  double relaxation_floor = 0.0;              // NaN when the floor solve failed
  Eigen::VectorXd dyn_multipliers;
  PenaltyCheck penalty_check;
  double defect_l1 = 0.0;                     // ||g(z*)||_1
  bool penalty_exact = true;                  // defect_l1 <= 1e-6

  const Eigen::VectorXd& final_iterate() const { return iterates.back(); }
  double final_penalty() const { return penalty_values.back(); }
  int subproblem_solves() const { return static_cast<int>(subsolver_stats.size()); }
};

/// Algorithm loop from a feasible z0. A step is accepted while it improves
/// P by at least epsilon; the first solve that does not is the fixed-point
/// check, and the anchor is returned as z*. Throws
/// ScvxError(infeasible_anchor) when z0 is not feasible; later failures end
/// the run with status failed and keep the partial trace.
SolveReport scvx(const OptimalControlProblem& problem, const Eigen::VectorXd& z0, const ScvxConfig& config);

/// P(z*) - min{P(y) : y in F_{z*}} from one subproblem solve.
double fixed_point_residual(const OptimalControlProblem& problem, const Eigen::VectorXd& z_star,
                            const ScvxConfig& config);

/// min P over Y and the dynamics rows with all state constraints dropped
/// (penalty mode: lambda sum max(g_j, 0) with g unconstrained). A lower
/// bound on every P(z^k). Throws ScvxError(solver_failure) when the solve fails.
double convex_relaxation_floor(const OptimalControlProblem& problem, const PenaltyConfig& penalty,
                               const SolverSettings& solver = {});

struct InitializerConfig {
  double initial_radius = 10.0;
  double max_radius = 1e4;
  int stall_limit = 20;
  int max_iterations = 200;
  double tolerance = 1e-8;
  SolverSettings solver;
};

struct InitializerReport {
  Eigen::VectorXd point;
  int cone_solves = 0;
  bool unchanged = false;             // init_guess was already feasible
  std::vector<double> violation_history;  // sum of constraint violations per accepted point
  int axis_fallbacks = 0;             // linearizations at a norm singularity
  std::vector<std::string> warnings;
};

/// Trust-region slack minimization: repeatedly minimize sum(s) subject to
/// y in Y, the dynamics rows, q_j(y_k) + grad q_j(y_k)(y - y_k) + s_j >= 0,
/// s >= 0 and ||y - y_k||_inf <= radius. Convexity makes the true violation
/// of q_j at y at most s_j. The radius doubles when a step lowers the true
/// violation and halves otherwise. Throws ScvxError(infeasible_scenario)
/// after `stall_limit` consecutive non-improving solves.
InitializerReport find_feasible_start(const OptimalControlProblem& problem, const Eigen::VectorXd& init_guess,
                                      const PenaltyConfig& penalty, const InitializerConfig& config = {});

}  // namespace scvx
