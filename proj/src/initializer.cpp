#include <algorithm>
#include <cmath>
#include <string>

#include "scvx/driver.hpp"
#include "scvx/linearizer.hpp"
#include "scvx/subproblem.hpp"

namespace scvx {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

constexpr double kStructuralTolerance = 1e-7;

// Gradient of fn at ys; at a norm singularity the norm term contributes
// w H' e_1 instead, a fixed supporting direction.
Eigen::VectorXd gradient_with_fallback(const ConvexFunction& fn, const Eigen::VectorXd& ys, bool& fell_back) {
  fell_back = false;
  try {
    return fn.local_gradient_at(ys);
  } catch (const ScvxError& e) {
    if (e.code() != ErrorCode::norm_singularity) throw;
  }
  fell_back = true;
  Eigen::VectorXd g = fn.linear.size() > 0 ? fn.linear : Eigen::VectorXd::Zero(fn.support_size());
  g += fn.norm_weight * fn.norm_map.row(0).transpose();
  if (fn.has_quadratic()) g += fn.quadratic * ys;
  return g;
}

double violation(const OptimalControlProblem& problem, const std::vector<int>& rows, const Eigen::VectorXd& y) {
  const std::span<const double> ys{y.data(), static_cast<std::size_t>(y.size())};
  double v = 0.0;
  for (int r : rows) v += std::max(0.0, -problem.constraints()[static_cast<std::size_t>(r)].eval(ys));
  return v;
}

bool structurally_feasible(const OptimalControlProblem& problem, const PenaltyConfig& penalty, const Eigen::VectorXd& y) {
  if (problem.base_set().max_violation(problem.dims(), {y.data(), static_cast<std::size_t>(y.size())}) >
      kStructuralTolerance)
    return false;
  if (penalty.mode == PenaltyMode::equality) {
    const Eigen::VectorXd g = eval_g(problem, y);
    if (g.size() > 0 && g.lpNorm<Eigen::Infinity>() > kStructuralTolerance) return false;
  }
  return true;
}

// Base rows (Y and dynamics) plus slack-relaxed linearizations and the
// trust box around yk.
ConicProgram slack_program(const OptimalControlProblem& problem, const ConicProgram& base,
                           const std::vector<int>& rows, const Eigen::VectorXd& yk, double radius,
                           InitializerReport& report) {
  const int ny = base.num_vars();
  const int ns = static_cast<int>(rows.size());
  const int base_rows = base.num_rows();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(base.A.nonZeros() + 8 * ns + 2 * ny));
  for (int col = 0; col < base.A.outerSize(); ++col)
    for (SpMat::InnerIterator it(base.A, col); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());

  const int extra = 2 * ns + 2 * ny;
  Eigen::VectorXd b(base_rows + extra);
  b.head(base_rows) = base.b;
  int r = base_rows;
  const std::span<const double> yspan{yk.data(), static_cast<std::size_t>(yk.size())};
  for (int j = 0; j < ns; ++j) {
    const auto& spec = problem.constraints()[static_cast<std::size_t>(rows[static_cast<std::size_t>(j)])];
    const Eigen::VectorXd ys = spec.fn.gather(yspan);
    bool fell_back = false;
    const Eigen::VectorXd grad = gradient_with_fallback(spec.fn, ys, fell_back);
    if (fell_back) {
      ++report.axis_fallbacks;
      report.warnings.push_back("constraint row " + std::to_string(rows[static_cast<std::size_t>(j)]) +
                                " linearized at a norm singularity; used the first image axis");
    }
    // grad'y + s_j + (q(yk) - grad'yk) >= 0
    for (std::size_t k = 0; k < spec.fn.support.size(); ++k)
      if (grad[static_cast<Eigen::Index>(k)] != 0.0) trips.emplace_back(r, spec.fn.support[k], -grad[static_cast<Eigen::Index>(k)]);
    trips.emplace_back(r, ny + j, -1.0);
    b[r] = spec.fn.eval_local(ys) - grad.dot(ys);
    ++r;
  }
  for (int j = 0; j < ns; ++j) {
    trips.emplace_back(r, ny + j, -1.0);
    b[r++] = 0.0;
  }
  for (int i = 0; i < ny; ++i) {
    trips.emplace_back(r, i, -1.0);  // y_i - (yk_i - radius) >= 0
    b[r++] = radius - yk[i];
    trips.emplace_back(r, i, 1.0);   // (yk_i + radius) - y_i >= 0
    b[r++] = yk[i] + radius;
  }

  ConicProgram p;
  p.c = Eigen::VectorXd::Zero(ny + ns);
  p.c.tail(ns).setOnes();
  p.A.resize(base_rows + extra, ny + ns);
  p.A.setFromTriplets(trips.begin(), trips.end());
  p.A.makeCompressed();
  p.b = std::move(b);
  p.cones = base.cones;
  p.cones.push_back({ConeKind::nonneg, extra});
  return p;
}

}  // namespace

InitializerReport find_feasible_start(const OptimalControlProblem& problem, const Eigen::VectorXd& init_guess,
                                      const PenaltyConfig& penalty, const InitializerConfig& config) {
  penalty.validate(problem);
  if (init_guess.size() != problem.dims().num_vars())
    throw ScvxError(ErrorCode::dimension_mismatch, "initial guess has wrong length");
  const std::vector<int> rows = linearized_rows(problem, penalty);
  InitializerReport report;

  Eigen::VectorXd y = init_guess;
  double v = violation(problem, rows, y);
  bool structural = structurally_feasible(problem, penalty, y);
  if (structural && v <= config.tolerance) {
    report.point = y;
    report.unchanged = true;
    report.violation_history.push_back(v);
    return report;
  }

  AssembleOptions opts;
  opts.include_objective = false;
  const ConicProgram base = assemble(problem, penalty, FeasibleRegion{}, opts).program;
  double radius = config.initial_radius;
  int stall = 0;
  for (int it = 0; it < config.max_iterations; ++it) {
    const ConicProgram prog = slack_program(problem, base, rows, y, radius, report);
    const ConicSolution sol = solve(prog, config.solver);
    ++report.cone_solves;
    bool accepted = false;
    if (sol.status == SolveStatus::optimal) {
      const Eigen::VectorXd y_new = sol.x.head(base.num_vars());
      const double v_new = violation(problem, rows, y_new);
      if (!structural || v_new < v) {
        y = y_new;
        v = v_new;
        structural = true;
        accepted = true;
        report.violation_history.push_back(v);
        if (v <= config.tolerance) {
          report.point = y;
          return report;
        }
      }
    }
    if (accepted) {
      radius = std::min(2.0 * radius, config.max_radius);
      stall = 0;
    } else {
      // An infeasible box can only be cured by growing it; a failed
      // improvement by shrinking it.
      radius = sol.status == SolveStatus::optimal ? 0.5 * radius : std::min(2.0 * radius, config.max_radius);
      if (++stall >= config.stall_limit)
        throw ScvxError(ErrorCode::infeasible_scenario,
                        "constraint violation stalled at " + std::to_string(v) + " for " +
                            std::to_string(config.stall_limit) + " solves");
    }
  }
  throw ScvxError(ErrorCode::infeasible_scenario, "no feasible point within the iteration limit");
}

}  // namespace scvx
