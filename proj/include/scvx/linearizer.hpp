#pragma once

// Project-and-linearize: the convexified region
//
//   F_z = { y in Y : grad q_j(zbar_j) (y - zbar_j) >= 0  for linearized j }
//
// where zbar_j is the projection of z onto {q_j <= 0}. For a feasible anchor
// z, z lies in F_z and F_z lies inside the feasible set.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "scvx/penalty.hpp"
#include "scvx/problem.hpp"

namespace scvx {

/// a' y_S >= b over the support S of constraint `constraint`.
struct Halfspace {
  int constraint = -1;     // row of q
  std::vector<int> support;
  Eigen::VectorXd normal;  // a = grad q_j(zbar_j), unnormalized
  double offset = 0.0;     // b = a' zbar_j
  Eigen::VectorXd foot;    // zbar_j restricted to S

  double value(const Eigen::VectorXd& y) const;  // a'y_S - b
};

struct FeasibleRegion {
  std::vector<Halfspace> halfspaces;  // ordered by constraint index
  Eigen::VectorXd anchor;
};

inline constexpr double kLicqTolerance = 1e-10;
inline constexpr double kAnchorTolerance = 1e-8;
inline constexpr double kAnchorBaseTolerance = 1e-6;

/// Rows of q that pass through project-and-linearize: the state constraints,
/// plus the dynamics defects in penalty mode.
std::vector<int> linearized_rows(const OptimalControlProblem& problem, const PenaltyConfig& penalty);

/// Throws ScvxError(infeasible_anchor, row) when q_row(z) < -1e-8 on a
/// linearized row or z leaves Y by more than 1e-6, and
/// ScvxError(licq_violation, row) when a gradient norm falls below 1e-10.
/// Projections run on `threads` workers; output order is independent of it.
FeasibleRegion build_feasible_region(const OptimalControlProblem& problem, const Eigen::VectorXd& z,
                                     const PenaltyConfig& penalty, int threads = 1);

/// Smallest halfspace slack at y (+inf for an empty list).
double min_halfspace_slack(const FeasibleRegion& region, const Eigen::VectorXd& y);

struct InvarianceReport {
  bool anchor_inside = false;
  double anchor_slack = 0.0;
  int samples = 0;
  int violations = 0;          // samples with some q_j < -1e-8
  double worst_margin = 0.0;   // min over samples of min_j q_j
  double interior_margin = 0.0;
};

/// Checks z in F_z, then draws hit-and-run samples from F_z (uniform in the
/// limit) and evaluates q at each. Deterministic for a fixed seed.
InvarianceReport verify_invariance(const OptimalControlProblem& problem, const FeasibleRegion& region,
                                   const PenaltyConfig& penalty, int n_samples, std::uint64_t seed = 1);

/// ||l(y, z1) - l(y, z2)|| / ||z1 - z2|| over the linearized rows.
/// Throws ScvxError(invalid_argument) when z1 == z2.
double lipschitz_probe(const OptimalControlProblem& problem, const PenaltyConfig& penalty, const Eigen::VectorXd& z1,
                       const Eigen::VectorXd& z2, const Eigen::VectorXd& y);

}  // namespace scvx
