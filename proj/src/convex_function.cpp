#include "scvx/convex_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scvx/error.hpp"

namespace scvx {

const char* to_string(ProjectorKind kind) {
  switch (kind) {
    case ProjectorKind::halfspace: return "halfspace";
    case ProjectorKind::ball: return "ball";
    case ProjectorKind::cylinder: return "cylinder";
    case ProjectorKind::none: return "none";
  }
  return "unknown";
}

ConvexFunction ConvexFunction::affine(std::vector<int> support, Eigen::VectorXd a, double c) {
  ConvexFunction f;
  f.support = std::move(support);
  f.linear = std::move(a);
  f.constant = c;
  f.validate();
  return f;
}

ConvexFunction ConvexFunction::norm(std::vector<int> support, Eigen::MatrixXd H,
                                    Eigen::VectorXd p, double weight, double c) {
  ConvexFunction f;
  f.linear = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(support.size()));
  f.support = std::move(support);
  f.norm_map = std::move(H);
  f.norm_center = std::move(p);
  f.norm_weight = weight;
  f.constant = c;
  f.validate();
  return f;
}

ConvexFunction ConvexFunction::quadratic_form(std::vector<int> support, Eigen::MatrixXd Q,
                                              Eigen::VectorXd a, double c) {
  ConvexFunction f;
  f.support = std::move(support);
  f.quadratic = std::move(Q);
  f.linear = std::move(a);
  f.constant = c;
  f.validate();
  return f;
}

void ConvexFunction::validate() const {
  const auto s = static_cast<Eigen::Index>(support.size());
  if (linear.size() != s)
    throw ScvxError(ErrorCode::dimension_mismatch, "linear term length differs from support size");
  if (norm_weight < 0.0) throw ScvxError(ErrorCode::non_convex, "negative norm weight");
  if (norm_map.size() > 0) {
    if (norm_map.cols() != s || norm_center.size() != norm_map.rows())
      throw ScvxError(ErrorCode::dimension_mismatch, "norm map / center shape mismatch");
  }
  if (quadratic.size() > 0) {
    if (quadratic.rows() != s || quadratic.cols() != s)
      throw ScvxError(ErrorCode::dimension_mismatch, "quadratic term must be |S| x |S|");
    if ((quadratic - quadratic.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + quadratic.cwiseAbs().maxCoeff()))
      throw ScvxError(ErrorCode::non_convex, "quadratic term is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(quadratic, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale)
      throw ScvxError(ErrorCode::non_convex, "quadratic term is indefinite");
  }
  for (int idx : support)
    if (idx < 0) throw ScvxError(ErrorCode::dimension_mismatch, "negative support index");
}

Eigen::VectorXd ConvexFunction::gather(std::span<const double> y) const {
  Eigen::VectorXd ys(static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto idx = static_cast<std::size_t>(support[k]);
    if (idx >= y.size())
      throw ScvxError(ErrorCode::dimension_mismatch, "support index outside the vector", support[k]);
    ys[static_cast<Eigen::Index>(k)] = y[idx];
  }
  return ys;
}

double ConvexFunction::eval_local(const Eigen::VectorXd& ys) const {
  double v = linear.dot(ys) + constant;
  if (has_norm()) v += norm_weight * (norm_map * ys - norm_center).norm();
  if (has_quadratic()) v += 0.5 * ys.dot(quadratic * ys);
  return v;
}

double ConvexFunction::eval(std::span<const double> y) const { return eval_local(gather(y)); }

Eigen::VectorXd ConvexFunction::local_gradient_at(const Eigen::VectorXd& ys, int tag) const {
  Eigen::VectorXd g = linear;
  if (has_norm()) {
    const Eigen::VectorXd r = norm_map * ys - norm_center;
    const double nr = r.norm();
    if (nr < kNormSingularityRadius)
      throw ScvxError(ErrorCode::norm_singularity, "gradient of a norm term at its center", tag);
    g += (norm_weight / nr) * (norm_map.transpose() * r);
  }
  if (has_quadratic()) g += quadratic * ys;
  return g;
}

Eigen::VectorXd ConvexFunction::local_gradient(std::span<const double> y, int tag) const {
  return local_gradient_at(gather(y), tag);
}

ConvexFunction ConvexFunction::remapped(const std::vector<int>& index_map) const {
  ConvexFunction f = *this;
  for (int& idx : f.support) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= index_map.size())
      throw ScvxError(ErrorCode::dimension_mismatch, "support index outside the remap table", idx);
    idx = index_map[static_cast<std::size_t>(idx)];
  }
  return f;
}

void ConvexFunction::add_linear_term(int index, double coeff) {
  auto it = std::find(support.begin(), support.end(), index);
  if (it != support.end()) {
    linear[it - support.begin()] += coeff;
    return;
  }
  support.push_back(index);
  const auto s = static_cast<Eigen::Index>(support.size());
  linear.conservativeResize(s);
  linear[s - 1] = coeff;
  if (norm_map.size() > 0) {
    norm_map.conservativeResize(Eigen::NoChange, s);
    norm_map.col(s - 1).setZero();
  }
  if (quadratic.size() > 0) {
    quadratic.conservativeResize(s, s);
    quadratic.row(s - 1).setZero();
    quadratic.col(s - 1).setZero();
  }
}

ProjectorKind ConvexFunction::projector_kind() const {
  if (is_affine()) return linear.squaredNorm() > 0.0 ? ProjectorKind::halfspace : ProjectorKind::none;
  if (has_quadratic() || linear.squaredNorm() > 0.0 || !has_norm()) return ProjectorKind::none;
  const Eigen::Index k = norm_map.rows();
  const Eigen::MatrixXd gram = norm_map * norm_map.transpose();
  if ((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-12) return ProjectorKind::none;
  if (ball_radius() < 0.0) return ProjectorKind::none;
  return k == norm_map.cols() ? ProjectorKind::ball : ProjectorKind::cylinder;
}

double ConvexFunction::ball_radius() const { return -constant / norm_weight; }

}  // namespace scvx
