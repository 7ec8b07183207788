#pragma once

// Euclidean projection of a point onto a sublevel set {y : q(y) <= 0} of a
// catalog function. Only the coordinates in the function's support move.

#include <Eigen/Dense>

#include "scvx/conic.hpp"
#include "scvx/convex_function.hpp"
#include "scvx/problem.hpp"

namespace scvx {

enum class ProjectionMethod { analytic, conic };

const char* to_string(ProjectionMethod method);

struct ProjectionResult {
  Eigen::VectorXd point;
  double distance = 0.0;
  bool on_boundary = false;
  ProjectionMethod method = ProjectionMethod::analytic;
};

/// Analytic formula for halfspace, ball and cylinder kinds, project_generic
/// otherwise.
ProjectionResult project(const ConvexFunction& fn, const Eigen::VectorXd& z);
ProjectionResult project(const ConstraintSpec& constraint, const Eigen::VectorXd& z);

/// Solves min ||z - y|| s.t. q(y) <= 0 as a cone program over the support
/// coordinates. Throws ScvxError(solver_failure) unless the solve is optimal.
ProjectionResult project_generic(const ConvexFunction& fn, const Eigen::VectorXd& z, double tol = 1e-9);

}  // namespace scvx
