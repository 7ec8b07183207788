#include "scvx/projector.hpp"

#include <cmath>
#include <string>

#include "scvx/epigraph.hpp"
#include "scvx/error.hpp"

namespace scvx {

const char* to_string(ProjectionMethod method) { return method == ProjectionMethod::analytic ? "analytic" : "conic"; }

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

ProjectionResult unchanged(const Eigen::VectorXd& z, ProjectionMethod method) {
  return {z, 0.0, false, method};
}

ProjectionResult with_support(const ConvexFunction& fn, const Eigen::VectorXd& z, const Eigen::VectorXd& ys,
                              ProjectionMethod method) {
  ProjectionResult out{z, 0.0, true, method};
  for (std::size_t k = 0; k < fn.support.size(); ++k) out.point[fn.support[k]] = ys[static_cast<Eigen::Index>(k)];
  out.distance = (out.point - z).norm();
  return out;
}

}  // namespace

ProjectionResult project(const ConvexFunction& fn, const Eigen::VectorXd& z) {
  const ProjectorKind kind = fn.projector_kind();
  if (kind == ProjectorKind::none) return project_generic(fn, z);
  const double qz = fn.eval(as_span(z));
  if (qz <= 0.0) return unchanged(z, ProjectionMethod::analytic);
  const Eigen::VectorXd zs = fn.gather(as_span(z));
  if (kind == ProjectorKind::halfspace) {
    // a'y + c <= 0
    return with_support(fn, z, zs - fn.linear * (qz / fn.linear.squaredNorm()), ProjectionMethod::analytic);
  }
  // ||H y - p|| <= r with H H' = I: move along H' toward the ball in the image.
  const double r = fn.ball_radius();
  const Eigen::VectorXd v = fn.norm_map * zs - fn.norm_center;
  const double nv = v.norm();
  const Eigen::VectorXd shift = fn.norm_map.transpose() * (v * (1.0 - r / nv));
  return with_support(fn, z, zs - shift, ProjectionMethod::analytic);
}

ProjectionResult project(const ConstraintSpec& constraint, const Eigen::VectorXd& z) {
  return project(constraint.fn, z);
}

ProjectionResult project_generic(const ConvexFunction& fn, const Eigen::VectorXd& z, double tol) {
  if (fn.eval(as_span(z)) <= 0.0) return unchanged(z, ProjectionMethod::conic);
  const int k = fn.support_size();
  const Eigen::VectorXd zs = fn.gather(as_span(z));
  ConicBuilder builder(k);
  const int t = builder.add_variable(1.0);
  std::vector<AffineExpr> cone{AffineExpr::variable(t)};
  for (int i = 0; i < k; ++i) {
    AffineExpr e = AffineExpr::variable(i);
    e.constant = -zs[i];
    cone.push_back(std::move(e));
  }
  builder.add_soc(cone);
  std::vector<int> columns(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) columns[static_cast<std::size_t>(i)] = i;
  add_sublevel_constraint(builder, fn, columns, AffineExpr::constant_value(0.0));

  SolverSettings settings;
  settings.tol = tol;
  const ConicSolution sol = solve(builder.build(), settings);
  if (sol.status != SolveStatus::optimal)
    throw ScvxError(ErrorCode::solver_failure,
                    std::string("projection solve ended with status ") + to_string(sol.status) + " after " +
                        std::to_string(sol.iterations) + " iterations");
  return with_support(fn, z, sol.x.head(k), ProjectionMethod::conic);
}

}  // namespace scvx
