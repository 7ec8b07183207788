#include "scvx/linearizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "scvx/error.hpp"
#include "scvx/projector.hpp"

namespace scvx {

double Halfspace::value(const Eigen::VectorXd& y) const {
  double v = -offset;
  for (std::size_t k = 0; k < support.size(); ++k) v += normal[static_cast<Eigen::Index>(k)] * y[support[k]];
  return v;
}

std::vector<int> linearized_rows(const OptimalControlProblem& problem, const PenaltyConfig& penalty) {
  const int first = penalty.mode == PenaltyMode::penalty ? 0 : problem.dims().num_dynamics_rows();
  std::vector<int> rows;
  for (int r = first; r < problem.dims().num_constraints(); ++r) rows.push_back(r);
  return rows;
}

namespace {

Halfspace linearize_row(const ConstraintSpec& spec, int row, const Eigen::VectorXd& z) {
  const ProjectionResult proj = project(spec.fn, z);
  Halfspace hs;
  hs.constraint = row;
  hs.support = spec.fn.support;
  hs.foot = spec.fn.gather({proj.point.data(), static_cast<std::size_t>(proj.point.size())});
  hs.normal = spec.fn.local_gradient_at(hs.foot, row);
  if (hs.normal.norm() < kLicqTolerance)
    throw ScvxError(ErrorCode::licq_violation, "vanishing gradient at the projection point", row);
  hs.offset = hs.normal.dot(hs.foot);
  return hs;
}

}  // namespace

FeasibleRegion build_feasible_region(const OptimalControlProblem& problem, const Eigen::VectorXd& z,
                                     const PenaltyConfig& penalty, int threads) {
  if (z.size() != problem.dims().num_vars()) throw ScvxError(ErrorCode::dimension_mismatch, "anchor has wrong length");
  const std::vector<int> rows = linearized_rows(problem, penalty);
  const auto& cons = problem.constraints();
  for (int r : rows) {
    const double q = cons[static_cast<std::size_t>(r)].eval({z.data(), static_cast<std::size_t>(z.size())});
    if (q < -kAnchorTolerance)
      throw ScvxError(ErrorCode::infeasible_anchor, "anchor violates constraint row " + std::to_string(r), r);
  }
  if (problem.base_set().max_violation(problem.dims(), {z.data(), static_cast<std::size_t>(z.size())}) >
      kAnchorBaseTolerance)
    throw ScvxError(ErrorCode::infeasible_anchor, "anchor lies outside the base set");

  FeasibleRegion region;
  region.anchor = z;
  region.halfspaces.resize(rows.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      region.halfspaces[k] = linearize_row(cons[static_cast<std::size_t>(rows[k])], rows[k], z);
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, rows.size() + 1);
  if (workers <= 1 || rows.size() < 2) {
    work(0, rows.size());
    return region;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  const std::size_t chunk = (rows.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk, end = std::min(rows.size(), begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  // Report the lowest-indexed failure so the error is independent of timing.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return region;
}

double min_halfspace_slack(const FeasibleRegion& region, const Eigen::VectorXd& y) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& hs : region.halfspaces) v = std::min(v, hs.value(y));
  return v;
}

double lipschitz_probe(const OptimalControlProblem& problem, const PenaltyConfig& penalty, const Eigen::VectorXd& z1,
                       const Eigen::VectorXd& z2, const Eigen::VectorXd& y) {
  const double dz = (z1 - z2).norm();
  if (!(dz > 0.0)) throw ScvxError(ErrorCode::invalid_argument, "probe points must differ");
  const auto& cons = problem.constraints();
  double sq = 0.0;
  for (int r : linearized_rows(problem, penalty)) {
    const auto& spec = cons[static_cast<std::size_t>(r)];
    const double l1 = linearize_row(spec, r, z1).value(y);
    const double l2 = linearize_row(spec, r, z2).value(y);
    sq += (l1 - l2) * (l1 - l2);
  }
  return std::sqrt(sq) / dz;
}

}  // namespace scvx
