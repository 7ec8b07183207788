#pragma once

// Discrete optimal control problem
//
//   min  J(y)  s.t.  y in Y,  g(y) = 0,  h(y) >= 0
//
// over the stacked variable y = (x_1, ..., x_T, u_1, ..., u_{T-1}). Steps are
// 0-based in code: states x[0..T-1], controls u[0..T-2]. The dynamics defect
// for step i is g_i = f(x_i, u_i) - x_{i+1} + x_i and the combined constraint
// vector is q = (g, h) with g first (step-major, component-minor), then h
// (step-major, component-minor).

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "scvx/convex_function.hpp"

namespace scvx {

struct ProblemDims {
  int n = 0;  // state dimension
  int m = 0;  // control dimension
  int T = 0;  // temporal points
  int s = 0;  // state constraints per step

  /// Throws ScvxError(invalid_argument) unless T >= 2, n >= 1, m >= 1, s >= 0.
  static ProblemDims make(int n, int m, int T, int s);

  int num_vars() const { return m * (T - 1) + n * T; }
  int num_constraints() const { return s * T + n * (T - 1); }
  int num_dynamics_rows() const { return n * (T - 1); }
  int state_offset(int step) const { return step * n; }
  int control_offset(int step) const { return n * T + step * m; }

  bool operator==(const ProblemDims&) const = default;
};

/// Flat decision vector with the fixed state-then-control layout.
class StackedVariable {
 public:
  StackedVariable() = default;
  StackedVariable(ProblemDims dims, Eigen::VectorXd values);

  const ProblemDims& dims() const { return dims_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  std::span<const double> span() const { return {values_.data(), static_cast<std::size_t>(values_.size())}; }

  Eigen::VectorXd state(int step) const;
  Eigen::VectorXd control(int step) const;

 private:
  ProblemDims dims_;
  Eigen::VectorXd values_;
};

/// Throws ScvxError(dimension_mismatch, index) naming the offending list entry
/// (states are indexed 0..T-1, controls T..2T-2).
StackedVariable stack(const ProblemDims& dims, const std::vector<Eigen::VectorXd>& states,
                      const std::vector<Eigen::VectorXd>& controls);

struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> controls;
};

Trajectory unstack(const StackedVariable& y);

enum class ConstraintKind { dynamics_defect, state_constraint };

/// One component q_j of the constraint vector, lifted to the stacked variable.
struct ConstraintSpec {
  ConstraintKind kind;
  int step;       // i
  int component;  // j within the step
  ConvexFunction fn;
  ProjectorKind projector;

  double eval(std::span<const double> y) const { return fn.eval(y); }
};

/// Per-component stage functions over local vectors. Dynamics components act
/// on (x, u) stacked as [x; u] (length n + m); state constraints act on x.
struct DynamicsModel {
  std::vector<ConvexFunction> components;
  bool is_affine() const;
};

struct StateConstraintModel {
  std::vector<ConvexFunction> components;
};

enum class Block { state, control };

struct BoxMember {
  Block block;
  int step;
  int coord;
  double lower;
  double upper;
};

/// ||F v + f|| <= d'v + e for the block vector v at one step. A Euclidean ball
/// has d = 0; a thrust cone has F = cos(theta) I, d = n_hat, e = 0.
struct SocMember {
  Block block;
  int step;
  Eigen::MatrixXd F;
  Eigen::VectorXd f;
  Eigen::VectorXd d;
  double e = 0.0;
  std::string label;
};

struct PinMember {
  Block block;
  int step;
  Eigen::VectorXd value;
};

/// Base convex set Y as an intersection of cone-representable members.
struct BaseSet {
  std::vector<BoxMember> boxes;
  std::vector<SocMember> cones;
  std::vector<PinMember> pins;

  /// Largest violation over all members (0 when y is in Y).
  double max_violation(const ProblemDims& dims, std::span<const double> y) const;
  /// True when every coordinate of y has finite bounds implied by a pin, a
  /// finite box, or a ball-type cone member.
  bool is_bounded(const ProblemDims& dims) const;
  void validate(const ProblemDims& dims) const;
};

int block_offset(const ProblemDims& dims, Block block, int step);
int block_size(const ProblemDims& dims, Block block);

/// Stage cost from a fixed catalog, plus a constant offset.
struct Objective {
  enum class Kind { control_norms, constant, quadratic };
  Kind kind = Kind::control_norms;
  double weight = 1.0;
  double offset = 0.0;
  Eigen::MatrixXd state_weight;    // quadratic: 1/2 x'Qx per state
  Eigen::MatrixXd control_weight;  // quadratic: 1/2 u'Ru per control

  static Objective min_fuel(double weight = 1.0, double offset = 0.0);
  static Objective min_time(double weight = 1.0);
  static Objective quadratic_cost(Eigen::MatrixXd Q, Eigen::MatrixXd R);

  /// Lifted stage terms whose sum plus constant_value() equals J.
  std::vector<ConvexFunction> terms(const ProblemDims& dims) const;
  double constant_value(const ProblemDims& dims) const;
};

class OptimalControlProblem {
 public:
  OptimalControlProblem(ProblemDims dims, DynamicsModel dynamics, StateConstraintModel state_constraints,
                        BaseSet base_set, Objective objective);

  const ProblemDims& dims() const { return dims_; }
  const DynamicsModel& dynamics() const { return dynamics_; }
  const StateConstraintModel& state_constraints() const { return state_constraints_; }
  const BaseSet& base_set() const { return base_set_; }
  const Objective& objective() const { return objective_; }

  /// All M lifted constraints in q order.
  const std::vector<ConstraintSpec>& constraints() const { return constraints_; }
  const std::vector<ConvexFunction>& objective_terms() const { return objective_terms_; }
  bool dynamics_affine() const { return dynamics_affine_; }

  double objective_value(std::span<const double> y) const;

 private:
  ProblemDims dims_;
  DynamicsModel dynamics_;
  StateConstraintModel state_constraints_;
  BaseSet base_set_;
  Objective objective_;
  std::vector<ConstraintSpec> constraints_;
  std::vector<ConvexFunction> objective_terms_;
  double objective_constant_ = 0.0;
  bool dynamics_affine_ = false;
};

Eigen::VectorXd eval_g(const OptimalControlProblem& problem, const Eigen::VectorXd& y);
Eigen::VectorXd eval_h(const OptimalControlProblem& problem, const Eigen::VectorXd& y);
Eigen::VectorXd eval_q(const OptimalControlProblem& problem, const Eigen::VectorXd& y);
/// Dense M x N_y Jacobian. Throws ScvxError(norm_singularity, j) at a norm
/// singularity of constraint j.
Eigen::MatrixXd jacobian_q(const OptimalControlProblem& problem, const Eigen::VectorXd& y);

/// min_j q_j(y), or +inf when M = 0.
double feasibility_margin(const OptimalControlProblem& problem, const Eigen::VectorXd& y);

/// Sampled midpoint convexity check of every q_j and objective term over the
/// given pairs; throws ScvxError(non_convex, j) on the first failure.
void check_sampled_convexity(const OptimalControlProblem& problem,
                             std::span<const Eigen::VectorXd> a,
                             std::span<const Eigen::VectorXd> b, double tol = 1e-9);

}  // namespace scvx
