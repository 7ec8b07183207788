#include "scvx/driver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "scvx/linearizer.hpp"
#include "scvx/subproblem.hpp"

namespace scvx {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void check_start(const OptimalControlProblem& problem, const PenaltyConfig& penalty, const Eigen::VectorXd& z) {
  if (z.size() != problem.dims().num_vars())
    throw ScvxError(ErrorCode::dimension_mismatch, "start point has wrong length");
  const Eigen::VectorXd q = eval_q(problem, z);
  for (Eigen::Index r = 0; r < q.size(); ++r)
    if (q[r] < -kAnchorTolerance)
      throw ScvxError(ErrorCode::infeasible_anchor,
                      "start point violates constraint row " + std::to_string(r) + "; run find_feasible_start first",
                      static_cast<int>(r));
  if (penalty.mode == PenaltyMode::equality) {
    const Eigen::VectorXd g = eval_g(problem, z);
    if (g.size() > 0 && g.lpNorm<Eigen::Infinity>() > kAnchorBaseTolerance)
      throw ScvxError(ErrorCode::infeasible_anchor, "start point violates the dynamics; run find_feasible_start first");
  }
  if (problem.base_set().max_violation(problem.dims(), as_span(z)) > kAnchorBaseTolerance)
    throw ScvxError(ErrorCode::infeasible_anchor, "start point lies outside the base set; run find_feasible_start first");
}

struct Succession {
  ConicSolution solution;
  SubproblemResult result;
  double seconds = 0.0;
};

Succession solve_at(const OptimalControlProblem& problem, const Eigen::VectorXd& z, const ScvxConfig& config,
                    int solve_index) {
  const FeasibleRegion region = build_feasible_region(problem, z, config.penalty, config.threads);
  const SubproblemArtifacts art = assemble(problem, config.penalty, region);
  if (config.on_subproblem) config.on_subproblem(solve_index, art.program);
  Succession out;
  const auto t0 = std::chrono::steady_clock::now();
  out.solution = solve(art.program, config.solver);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.solution.status == SolveStatus::optimal) out.result = extract(problem, config.penalty, art, out.solution);
  return out;
}

}  // namespace

void ScvxConfig::validate() const {
  if (!(epsilon > 0.0)) throw ScvxError(ErrorCode::invalid_argument, "epsilon must be positive");
  if (max_successions < 1) throw ScvxError(ErrorCode::invalid_argument, "max_successions must be at least 1");
}

const char* to_string(ScvxStatus status) {
  switch (status) {
    case ScvxStatus::converged: return "converged";
    case ScvxStatus::max_successions: return "max-successions";
    case ScvxStatus::failed: return "failed";
  }
  return "unknown";
}

double convex_relaxation_floor(const OptimalControlProblem& problem, const PenaltyConfig& penalty,
                               const SolverSettings& solver) {
  const SubproblemArtifacts art = assemble(problem, penalty, FeasibleRegion{});
  const ConicSolution sol = solve(art.program, solver);
  if (sol.status != SolveStatus::optimal)
    throw ScvxError(ErrorCode::solver_failure, std::string("relaxation solve ended with status ") + to_string(sol.status));
  return art.program.c.dot(sol.x) + art.objective_constant;
}

double fixed_point_residual(const OptimalControlProblem& problem, const Eigen::VectorXd& z_star,
                            const ScvxConfig& config) {
  config.penalty.validate(problem);
  check_start(problem, config.penalty, z_star);
  const Succession s = solve_at(problem, z_star, config, 1);
  if (s.solution.status != SolveStatus::optimal)
    throw ScvxError(ErrorCode::solver_failure,
                    std::string("fixed-point solve ended with status ") + to_string(s.solution.status));
  return penalty_value(problem, config.penalty, z_star) - s.result.objective_value;
}

SolveReport scvx(const OptimalControlProblem& problem, const Eigen::VectorXd& z0, const ScvxConfig& config) {
  config.validate();
  config.penalty.validate(problem);
  check_start(problem, config.penalty, z0);

  SolveReport report;
  report.fixed_point_residual = kNaN;
  auto record = [&](const Eigen::VectorXd& z, double P) {
    report.iterates.push_back(z);
    report.penalty_values.push_back(P);
    report.feasibility_margins.push_back(feasibility_margin(problem, z));
    report.base_violations.push_back(problem.base_set().max_violation(problem.dims(), as_span(z)));
  };
  try {
    report.relaxation_floor = convex_relaxation_floor(problem, config.penalty, config.solver);
  } catch (const ScvxError&) {
    report.relaxation_floor = kNaN;
  }

  Eigen::VectorXd z = z0;
  double Pz = penalty_value(problem, config.penalty, z);
  record(z, Pz);
  report.status = ScvxStatus::max_successions;

  for (int solve_index = 1;; ++solve_index) {
    if (report.successions >= config.max_successions) break;
    Succession s;
    try {
      s = solve_at(problem, z, config, solve_index);
    } catch (const ScvxError& e) {
      report.status = ScvxStatus::failed;
      report.failure_reason = std::string(to_string(e.code())) + ": " + e.what();
      report.failed_solve = solve_index;
      break;
    }
    report.solve_seconds.push_back(s.seconds);
    SubsolverStats stats;
    stats.status = s.solution.status;
    stats.iterations = s.solution.iterations;
    stats.gap = s.solution.gap;
    if (s.solution.status != SolveStatus::optimal) {
      report.subsolver_stats.push_back(stats);
      report.status = ScvxStatus::failed;
      report.failure_reason = std::string("subproblem solve ended with status ") + to_string(s.solution.status);
      report.failed_solve = solve_index;
      break;
    }
    stats.solver_objective = s.result.solver_objective;
    stats.penalty_value = s.result.objective_value;
    report.subsolver_stats.push_back(stats);
    report.dyn_multipliers = s.result.dyn_multipliers;

    const double improvement = Pz - s.result.objective_value;
    if (improvement < config.epsilon) {
      report.status = ScvxStatus::converged;
      report.fixed_point_residual = improvement;
      break;
    }
    z = s.result.z_next;
    Pz = s.result.objective_value;
    record(z, Pz);
    ++report.successions;
  }

  report.penalty_check = validate_penalty_weight(config.penalty, report.dyn_multipliers);
  const Eigen::VectorXd g = eval_g(problem, report.final_iterate());
  report.defect_l1 = g.size() == 0 ? 0.0 : g.lpNorm<1>();
  report.penalty_exact = config.penalty.mode == PenaltyMode::equality || report.defect_l1 <= 1e-6;
  return report;
}

}  // namespace scvx
