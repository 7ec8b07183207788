#pragma once

// Convex subproblem: minimize P(y) over F_z, written as a ConicProgram.
//
// Columns: y (0..N_y-1), then epigraph auxiliaries of the objective terms,
// then penalty auxiliaries t_j >= g_j(y) in penalty mode.
// Rows: pins and equality-mode dynamics (zero cone); halfspaces, boxes and
// auxiliary bounds (orthant); base-set cones and epigraphs (SOC).

#include <Eigen/Dense>
#include <vector>

#include "scvx/conic.hpp"
#include "scvx/linearizer.hpp"
#include "scvx/penalty.hpp"
#include "scvx/problem.hpp"

namespace scvx {

struct AssembleOptions {
  bool include_objective = true;
};

struct SubproblemArtifacts {
  ConicProgram program;
  int num_y = 0;
  double objective_constant = 0.0;     // J offset not carried by c
  std::vector<int> objective_columns;  // one per objective term with an epigraph
  std::vector<int> penalty_columns;    // t_j per dynamics row (penalty mode, lambda > 0)
  std::vector<int> pin_rows;           // first row of each pin member
  std::vector<int> dynamics_rows;      // per dynamics row: zero row or halfspace row, -1 if absent
  std::vector<int> halfspace_rows;     // per region halfspace
  std::vector<int> box_lower_rows;     // per box member, -1 for an infinite bound
  std::vector<int> box_upper_rows;
  std::vector<int> cone_rows;          // first row of each base-set cone member
};

/// Builds the program. An empty region gives the convex relaxation used as
/// the lower-bound floor. Throws ScvxError(unsupported_model) for equality
/// mode with non-affine dynamics.
SubproblemArtifacts assemble(const OptimalControlProblem& problem, const PenaltyConfig& penalty,
                             const FeasibleRegion& region, const AssembleOptions& options = {});

struct SubproblemResult {
  Eigen::VectorXd z_next;
  Eigen::VectorXd dyn_multipliers;  // duals of the dynamics rows (empty when absent)
  double objective_value = 0.0;     // P(z_next) recomputed from y
  double solver_objective = 0.0;    // c'x + objective_constant
};

/// Throws ScvxError(solver_failure) unless the solution is optimal.
SubproblemResult extract(const OptimalControlProblem& problem, const PenaltyConfig& penalty,
                         const SubproblemArtifacts& artifacts, const ConicSolution& solution);

}  // namespace scvx
