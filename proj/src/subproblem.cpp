#include "scvx/subproblem.hpp"

#include <cmath>
#include <string>

#include "scvx/epigraph.hpp"
#include "scvx/error.hpp"

namespace scvx {

namespace {

enum class RowGroup { zero, nonneg, soc };

struct PendingRow {
  RowGroup group;
  int ordinal;
};

int final_row(const ConicBuilder& b, PendingRow r) {
  if (r.ordinal < 0) return -1;
  switch (r.group) {
    case RowGroup::zero: return b.equality_row(r.ordinal);
    case RowGroup::nonneg: return b.nonneg_row(r.ordinal);
    case RowGroup::soc: return b.soc_first_row(r.ordinal);
  }
  return -1;
}

AffineExpr block_coord(const ProblemDims& dims, Block block, int step, int coord, double coeff = 1.0) {
  return AffineExpr::variable(block_offset(dims, block, step) + coord, coeff);
}

}  // namespace

SubproblemArtifacts assemble(const OptimalControlProblem& problem, const PenaltyConfig& penalty,
                             const FeasibleRegion& region, const AssembleOptions& options) {
  penalty.validate(problem);
  const ProblemDims& dims = problem.dims();
  const BaseSet& base = problem.base_set();
  const int ny = dims.num_vars();
  ConicBuilder builder(ny);
  SubproblemArtifacts art;
  art.num_y = ny;

  std::vector<PendingRow> pins, dyn(static_cast<std::size_t>(dims.num_dynamics_rows()), {RowGroup::zero, -1});
  std::vector<PendingRow> halfspaces, lowers, uppers, cones;

  for (const auto& pin : base.pins) {
    int first = -1;
    for (int k = 0; k < pin.value.size(); ++k) {
      AffineExpr e = block_coord(dims, pin.block, pin.step, k);
      e.constant = -pin.value[k];
      const int ord = builder.add_equality(e);
      if (k == 0) first = ord;
    }
    pins.push_back({RowGroup::zero, first});
  }

  const auto& cons = problem.constraints();
  if (penalty.mode == PenaltyMode::equality) {
    for (int r = 0; r < dims.num_dynamics_rows(); ++r) {
      const ConvexFunction& g = cons[static_cast<std::size_t>(r)].fn;
      AffineExpr e;
      e.constant = g.constant;
      for (std::size_t k = 0; k < g.support.size(); ++k)
        if (g.linear[static_cast<Eigen::Index>(k)] != 0.0) e.add(g.support[k], g.linear[static_cast<Eigen::Index>(k)]);
      dyn[static_cast<std::size_t>(r)] = {RowGroup::zero, builder.add_equality(e)};
    }
  }

  for (const auto& hs : region.halfspaces) {
    if (hs.constraint < 0 || hs.constraint >= dims.num_constraints())
      throw ScvxError(ErrorCode::dimension_mismatch, "halfspace refers to an unknown constraint", hs.constraint);
    AffineExpr e;
    e.constant = -hs.offset;
    for (std::size_t k = 0; k < hs.support.size(); ++k)
      if (hs.normal[static_cast<Eigen::Index>(k)] != 0.0) e.add(hs.support[k], hs.normal[static_cast<Eigen::Index>(k)]);
    const PendingRow row{RowGroup::nonneg, builder.add_nonneg(e)};
    halfspaces.push_back(row);
    if (hs.constraint < dims.num_dynamics_rows()) dyn[static_cast<std::size_t>(hs.constraint)] = row;
  }

  for (const auto& box : base.boxes) {
    PendingRow lo{RowGroup::nonneg, -1}, hi{RowGroup::nonneg, -1};
    if (std::isfinite(box.lower)) {
      AffineExpr e = block_coord(dims, box.block, box.step, box.coord);
      e.constant = -box.lower;
      lo.ordinal = builder.add_nonneg(e);
    }
    if (std::isfinite(box.upper)) {
      AffineExpr e = block_coord(dims, box.block, box.step, box.coord, -1.0);
      e.constant = box.upper;
      hi.ordinal = builder.add_nonneg(e);
    }
    lowers.push_back(lo);
    uppers.push_back(hi);
  }

  for (const auto& member : base.cones) {
    const int off = block_offset(dims, member.block, member.step);
    std::vector<AffineExpr> rows;
    AffineExpr head;
    head.constant = member.e;
    for (Eigen::Index k = 0; k < member.d.size(); ++k)
      if (member.d[k] != 0.0) head.add(off + static_cast<int>(k), member.d[k]);
    rows.push_back(head);
    for (Eigen::Index r = 0; r < member.F.rows(); ++r) {
      AffineExpr e;
      e.constant = member.f[r];
      for (Eigen::Index k = 0; k < member.F.cols(); ++k)
        if (member.F(r, k) != 0.0) e.add(off + static_cast<int>(k), member.F(r, k));
      rows.push_back(std::move(e));
    }
    cones.push_back({RowGroup::soc, builder.add_soc(rows)});
  }

  if (options.include_objective) {
    art.objective_constant = problem.objective().constant_value(dims);
    for (const auto& term : problem.objective_terms()) {
      const int t = builder.add_variable(1.0);
      art.objective_columns.push_back(t);
      add_sublevel_constraint(builder, term, term.support, AffineExpr::variable(t));
    }
    if (penalty.mode == PenaltyMode::penalty && penalty.lambda > 0.0) {
      // t_j >= max(g_j(y), 0); g >= 0 is implied by the dynamics halfspaces,
      // so t_j = |g_j| at the optimum.
      for (int r = 0; r < dims.num_dynamics_rows(); ++r) {
        const int t = builder.add_variable(penalty.lambda);
        art.penalty_columns.push_back(t);
        const ConvexFunction& g = cons[static_cast<std::size_t>(r)].fn;
        add_sublevel_constraint(builder, g, g.support, AffineExpr::variable(t));
        builder.add_nonneg(AffineExpr::variable(t));
      }
    }
  }

  art.program = builder.build();
  for (auto r : pins) art.pin_rows.push_back(final_row(builder, r));
  for (auto r : dyn) art.dynamics_rows.push_back(final_row(builder, r));
  for (auto r : halfspaces) art.halfspace_rows.push_back(final_row(builder, r));
  for (auto r : lowers) art.box_lower_rows.push_back(final_row(builder, r));
  for (auto r : uppers) art.box_upper_rows.push_back(final_row(builder, r));
  for (auto r : cones) art.cone_rows.push_back(final_row(builder, r));
  return art;
}

SubproblemResult extract(const OptimalControlProblem& problem, const PenaltyConfig& penalty,
                         const SubproblemArtifacts& artifacts, const ConicSolution& solution) {
  if (solution.status != SolveStatus::optimal)
    throw ScvxError(ErrorCode::solver_failure, std::string("subproblem solve ended with status ") +
                                                   to_string(solution.status) + " after " +
                                                   std::to_string(solution.iterations) + " iterations");
  SubproblemResult out;
  out.z_next = solution.x.head(artifacts.num_y);
  out.objective_value = penalty_value(problem, penalty, out.z_next);
  out.solver_objective = artifacts.program.c.dot(solution.x) + artifacts.objective_constant;
  bool any = false;
  for (int r : artifacts.dynamics_rows) any = any || r >= 0;
  if (any) {
    out.dyn_multipliers = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(artifacts.dynamics_rows.size()));
    for (std::size_t k = 0; k < artifacts.dynamics_rows.size(); ++k)
      if (artifacts.dynamics_rows[k] >= 0) out.dyn_multipliers[static_cast<Eigen::Index>(k)] = solution.z[artifacts.dynamics_rows[k]];
  }
  return out;
}

}  // namespace scvx
