#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace scvx {

/// Kinds of sets {q <= 0} with a closed-form Euclidean projection.
enum class ProjectorKind { halfspace, ball, cylinder, none };

const char* to_string(ProjectorKind kind);

/// Scalar convex function from the modeling catalog
///
///   q(y) = a'y_S + c + w ||H y_S - p||_2 + 1/2 y_S' Q y_S
///
/// acting on the coordinates S = `support` of a larger vector y. Convexity
/// holds whenever w >= 0 and Q is positive semidefinite; `validate()` checks
/// both. Every member is second-order-cone representable.
struct ConvexFunction {
  std::vector<int> support;
  Eigen::VectorXd linear;       // a, one entry per support coordinate
  double constant = 0.0;        // c
  double norm_weight = 0.0;     // w
  Eigen::MatrixXd norm_map;     // H, k x |S|; empty when w == 0
  Eigen::VectorXd norm_center;  // p, length k
  Eigen::MatrixXd quadratic;    // Q, |S| x |S|; empty when absent

  static ConvexFunction affine(std::vector<int> support, Eigen::VectorXd a, double c);
  /// w ||H y_S - p|| + c
  static ConvexFunction norm(std::vector<int> support, Eigen::MatrixXd H, Eigen::VectorXd p,
                             double weight = 1.0, double c = 0.0);
  /// 1/2 y_S' Q y_S + a'y_S + c
  static ConvexFunction quadratic_form(std::vector<int> support, Eigen::MatrixXd Q,
                                       Eigen::VectorXd a, double c);

  int support_size() const { return static_cast<int>(support.size()); }
  bool has_norm() const { return norm_weight != 0.0 && norm_map.size() > 0; }
  bool has_quadratic() const { return quadratic.size() > 0; }
  bool is_affine() const { return !has_norm() && !has_quadratic(); }

  /// Throws ScvxError(non_convex) for negative weight or an indefinite Q and
  /// ScvxError(dimension_mismatch) for inconsistent block sizes.
  void validate() const;

  Eigen::VectorXd gather(std::span<const double> y) const;
  double eval(std::span<const double> y) const;
  double eval_local(const Eigen::VectorXd& ys) const;

  /// Gradient with respect to the support coordinates. Throws
  /// ScvxError(norm_singularity, tag) when ||H y_S - p|| < 1e-12.
  Eigen::VectorXd local_gradient(std::span<const double> y, int tag = -1) const;
  Eigen::VectorXd local_gradient_at(const Eigen::VectorXd& ys, int tag = -1) const;

  /// Same function with support[k] replaced by index_map[support[k]].
  ConvexFunction remapped(const std::vector<int>& index_map) const;

  /// Adds coeff * y[index], growing the support when needed.
  void add_linear_term(int index, double coeff);

  ProjectorKind projector_kind() const;
  /// Radius r of the set {||H y_S - p|| <= r} for ball/cylinder kinds.
  double ball_radius() const;
};

inline constexpr double kNormSingularityRadius = 1e-12;

}  // namespace scvx
