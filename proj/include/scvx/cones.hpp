#pragma once

// Second-order cone algebra: Jordan product, its inverse, Nesterov-Todd
// scaling and step-to-boundary computations. The cone is
// K = {(u0, u1) : u0 >= ||u1||} with identity e = (1, 0, ..., 0).

#include <Eigen/Dense>
#include <limits>

namespace scvx::cones {

inline constexpr double kInfiniteStep = std::numeric_limits<double>::infinity();

/// u0^2 - ||u1||^2 (the squared J-norm); positive in the interior.
double soc_residual(const Eigen::Ref<const Eigen::VectorXd>& u);

/// u0 - ||u1||, the smallest spectral value.
double soc_min_eig(const Eigen::Ref<const Eigen::VectorXd>& u);

/// u o v = (u'v, u0 v1 + v0 u1).
Eigen::VectorXd jordan_product(const Eigen::Ref<const Eigen::VectorXd>& u,
                               const Eigen::Ref<const Eigen::VectorXd>& v);

/// w with lambda o w = xi; lambda must be in the interior.
Eigen::VectorXd jordan_divide(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                              const Eigen::Ref<const Eigen::VectorXd>& xi);

/// Largest alpha >= 0 with u + alpha d in K, for u in the interior; returns
/// kInfiniteStep when the ray never leaves the cone.
double soc_max_step(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& d);

/// Orthant counterpart of soc_max_step.
double orthant_max_step(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& d);

/// Nesterov-Todd scaling W = eta * Wbar of one second-order cone, with
/// W z = W^{-1} s = lambda.
struct SocScaling {
  double eta = 1.0;
  Eigen::VectorXd w;  // wbar, with w0^2 - ||w1||^2 = 1

  static SocScaling identity(int dim);
  /// Requires s and z strictly inside the cone; returns false otherwise.
  bool update(const Eigen::Ref<const Eigen::VectorXd>& s, const Eigen::Ref<const Eigen::VectorXd>& z);

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::VectorXd apply_inverse(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  /// Dense W^2 = eta^2 (2 w w' - J).
  Eigen::MatrixXd squared() const;
};

}  // namespace scvx::cones
