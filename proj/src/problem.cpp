#include "scvx/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scvx/error.hpp"

namespace scvx {

ProblemDims ProblemDims::make(int n, int m, int T, int s) {
  if (T < 2) throw ScvxError(ErrorCode::invalid_argument, "need at least two temporal points");
  if (n < 1) throw ScvxError(ErrorCode::invalid_argument, "state dimension must be positive");
  if (m < 1) throw ScvxError(ErrorCode::invalid_argument, "control dimension must be positive");
  if (s < 0) throw ScvxError(ErrorCode::invalid_argument, "negative state-constraint count");
  return ProblemDims{n, m, T, s};
}

StackedVariable::StackedVariable(ProblemDims dims, Eigen::VectorXd values)
    : dims_(dims), values_(std::move(values)) {
  if (values_.size() != dims_.num_vars())
    throw ScvxError(ErrorCode::dimension_mismatch, "stacked variable length differs from N_y");
}

Eigen::VectorXd StackedVariable::state(int step) const {
  return values_.segment(dims_.state_offset(step), dims_.n);
}

Eigen::VectorXd StackedVariable::control(int step) const {
  return values_.segment(dims_.control_offset(step), dims_.m);
}

StackedVariable stack(const ProblemDims& dims, const std::vector<Eigen::VectorXd>& states,
                      const std::vector<Eigen::VectorXd>& controls) {
  if (static_cast<int>(states.size()) != dims.T)
    throw ScvxError(ErrorCode::dimension_mismatch, "expected T state vectors");
  if (static_cast<int>(controls.size()) != dims.T - 1)
    throw ScvxError(ErrorCode::dimension_mismatch, "expected T-1 control vectors");
  Eigen::VectorXd y(dims.num_vars());
  for (int i = 0; i < dims.T; ++i) {
    if (states[static_cast<std::size_t>(i)].size() != dims.n)
      throw ScvxError(ErrorCode::dimension_mismatch, "state vector has wrong length", i);
    y.segment(dims.state_offset(i), dims.n) = states[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i + 1 < dims.T; ++i) {
    if (controls[static_cast<std::size_t>(i)].size() != dims.m)
      throw ScvxError(ErrorCode::dimension_mismatch, "control vector has wrong length", dims.T + i);
    y.segment(dims.control_offset(i), dims.m) = controls[static_cast<std::size_t>(i)];
  }
  return StackedVariable(dims, std::move(y));
}

Trajectory unstack(const StackedVariable& y) {
  Trajectory out;
  const auto& d = y.dims();
  for (int i = 0; i < d.T; ++i) out.states.push_back(y.state(i));
  for (int i = 0; i + 1 < d.T; ++i) out.controls.push_back(y.control(i));
  return out;
}

bool DynamicsModel::is_affine() const {
  return std::all_of(components.begin(), components.end(),
                     [](const ConvexFunction& f) { return f.is_affine(); });
}

int block_offset(const ProblemDims& dims, Block block, int step) {
  return block == Block::state ? dims.state_offset(step) : dims.control_offset(step);
}

int block_size(const ProblemDims& dims, Block block) { return block == Block::state ? dims.n : dims.m; }

namespace {

void check_block(const ProblemDims& dims, Block block, int step, int index) {
  const int steps = block == Block::state ? dims.T : dims.T - 1;
  if (step < 0 || step >= steps)
    throw ScvxError(ErrorCode::dimension_mismatch, "base-set member step out of range", index);
}

Eigen::VectorXd block_values(const ProblemDims& dims, Block block, int step, std::span<const double> y) {
  const int off = block_offset(dims, block, step);
  const int len = block_size(dims, block);
  Eigen::VectorXd v(len);
  for (int k = 0; k < len; ++k) v[k] = y[static_cast<std::size_t>(off + k)];
  return v;
}

}  // namespace

void BaseSet::validate(const ProblemDims& dims) const {
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const auto& b = boxes[k];
    check_block(dims, b.block, b.step, static_cast<int>(k));
    if (b.coord < 0 || b.coord >= block_size(dims, b.block))
      throw ScvxError(ErrorCode::dimension_mismatch, "box coordinate out of range", static_cast<int>(k));
    if (!(b.lower <= b.upper))
      throw ScvxError(ErrorCode::invalid_argument, "box with lower > upper", static_cast<int>(k));
  }
  for (std::size_t k = 0; k < cones.size(); ++k) {
    const auto& c = cones[k];
    check_block(dims, c.block, c.step, static_cast<int>(k));
    const int len = block_size(dims, c.block);
    if (c.F.cols() != len || c.f.size() != c.F.rows() || c.d.size() != len)
      throw ScvxError(ErrorCode::dimension_mismatch, "cone member shape mismatch", static_cast<int>(k));
  }
  for (std::size_t k = 0; k < pins.size(); ++k) {
    const auto& p = pins[k];
    check_block(dims, p.block, p.step, static_cast<int>(k));
    if (p.value.size() != block_size(dims, p.block))
      throw ScvxError(ErrorCode::dimension_mismatch, "pin value has wrong length", static_cast<int>(k));
  }
}

double BaseSet::max_violation(const ProblemDims& dims, std::span<const double> y) const {
  double worst = 0.0;
  for (const auto& b : boxes) {
    const double v = y[static_cast<std::size_t>(block_offset(dims, b.block, b.step) + b.coord)];
    worst = std::max({worst, b.lower - v, v - b.upper});
  }
  for (const auto& c : cones) {
    const Eigen::VectorXd v = block_values(dims, c.block, c.step, y);
    worst = std::max(worst, (c.F * v + c.f).norm() - (c.d.dot(v) + c.e));
  }
  for (const auto& p : pins) {
    const Eigen::VectorXd v = block_values(dims, p.block, p.step, y);
    worst = std::max(worst, (v - p.value).cwiseAbs().maxCoeff());
  }
  return worst;
}

bool BaseSet::is_bounded(const ProblemDims& dims) const {
  std::vector<char> bounded(static_cast<std::size_t>(dims.num_vars()), 0);
  auto mark = [&](Block block, int step, int coord) {
    bounded[static_cast<std::size_t>(block_offset(dims, block, step) + coord)] = 1;
  };
  for (const auto& b : boxes)
    if (std::isfinite(b.lower) && std::isfinite(b.upper)) mark(b.block, b.step, b.coord);
  for (const auto& p : pins)
    for (int k = 0; k < p.value.size(); ++k) mark(p.block, p.step, k);
  for (const auto& c : cones) {
    if (c.d.squaredNorm() != 0.0) continue;
    // ||F v + f|| <= e bounds v_k exactly when e_k lies in the row space of F.
    const Eigen::MatrixXd P = c.F.completeOrthogonalDecomposition().pseudoInverse() * c.F;
    for (int k = 0; k < c.F.cols(); ++k)
      if (std::fabs(P(k, k) - 1.0) <= 1e-9) mark(c.block, c.step, k);
  }
  return std::all_of(bounded.begin(), bounded.end(), [](char b) { return b != 0; });
}

Objective Objective::min_fuel(double weight, double offset) {
  Objective o;
  o.kind = Kind::control_norms;
  o.weight = weight;
  o.offset = offset;
  return o;
}

Objective Objective::min_time(double weight) {
  Objective o;
  o.kind = Kind::constant;
  o.weight = weight;
  return o;
}

Objective Objective::quadratic_cost(Eigen::MatrixXd Q, Eigen::MatrixXd R) {
  Objective o;
  o.kind = Kind::quadratic;
  o.state_weight = std::move(Q);
  o.control_weight = std::move(R);
  return o;
}

namespace {

std::vector<int> block_support(const ProblemDims& dims, Block block, int step) {
  std::vector<int> s(static_cast<std::size_t>(block_size(dims, block)));
  const int off = block_offset(dims, block, step);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = off + static_cast<int>(k);
  return s;
}

}  // namespace

std::vector<ConvexFunction> Objective::terms(const ProblemDims& dims) const {
  std::vector<ConvexFunction> out;
  switch (kind) {
    case Kind::control_norms:
      if (weight < 0.0) throw ScvxError(ErrorCode::non_convex, "negative fuel weight");
      for (int i = 0; i + 1 < dims.T; ++i)
        out.push_back(ConvexFunction::norm(block_support(dims, Block::control, i),
                                           Eigen::MatrixXd::Identity(dims.m, dims.m),
                                           Eigen::VectorXd::Zero(dims.m), weight));
      break;
    case Kind::constant:
      break;
    case Kind::quadratic:
      if (state_weight.size() > 0) {
        if (state_weight.rows() != dims.n || state_weight.cols() != dims.n)
          throw ScvxError(ErrorCode::dimension_mismatch, "state weight must be n x n");
        for (int i = 0; i < dims.T; ++i)
          out.push_back(ConvexFunction::quadratic_form(block_support(dims, Block::state, i), state_weight,
                                                       Eigen::VectorXd::Zero(dims.n), 0.0));
      }
      if (control_weight.size() > 0) {
        if (control_weight.rows() != dims.m || control_weight.cols() != dims.m)
          throw ScvxError(ErrorCode::dimension_mismatch, "control weight must be m x m");
        for (int i = 0; i + 1 < dims.T; ++i)
          out.push_back(ConvexFunction::quadratic_form(block_support(dims, Block::control, i),
                                                       control_weight, Eigen::VectorXd::Zero(dims.m), 0.0));
      }
      break;
  }
  return out;
}

double Objective::constant_value(const ProblemDims& dims) const {
  return kind == Kind::constant ? offset + weight * dims.T : offset;
}

OptimalControlProblem::OptimalControlProblem(ProblemDims dims, DynamicsModel dynamics,
                                             StateConstraintModel state_constraints, BaseSet base_set,
                                             Objective objective)
    : dims_(ProblemDims::make(dims.n, dims.m, dims.T, dims.s)),
      dynamics_(std::move(dynamics)),
      state_constraints_(std::move(state_constraints)),
      base_set_(std::move(base_set)),
      objective_(std::move(objective)) {
  if (static_cast<int>(dynamics_.components.size()) != dims_.n)
    throw ScvxError(ErrorCode::dimension_mismatch, "dynamics must have n components");
  if (static_cast<int>(state_constraints_.components.size()) != dims_.s)
    throw ScvxError(ErrorCode::dimension_mismatch, "state constraints must have s components");
  base_set_.validate(dims_);

  const int n = dims_.n;
  const int m = dims_.m;
  for (std::size_t j = 0; j < dynamics_.components.size(); ++j) {
    const auto& f = dynamics_.components[j];
    f.validate();
    for (int idx : f.support)
      if (idx >= n + m)
        throw ScvxError(ErrorCode::dimension_mismatch, "dynamics support outside (x, u)", static_cast<int>(j));
  }
  for (std::size_t j = 0; j < state_constraints_.components.size(); ++j) {
    const auto& h = state_constraints_.components[j];
    h.validate();
    for (int idx : h.support)
      if (idx >= n)
        throw ScvxError(ErrorCode::dimension_mismatch, "state-constraint support outside x", static_cast<int>(j));
  }

  constraints_.reserve(static_cast<std::size_t>(dims_.num_constraints()));
  std::vector<int> xu_map(static_cast<std::size_t>(n + m));
  for (int i = 0; i + 1 < dims_.T; ++i) {
    for (int k = 0; k < n; ++k) xu_map[static_cast<std::size_t>(k)] = dims_.state_offset(i) + k;
    for (int k = 0; k < m; ++k) xu_map[static_cast<std::size_t>(n + k)] = dims_.control_offset(i) + k;
    for (int j = 0; j < n; ++j) {
      ConvexFunction g = dynamics_.components[static_cast<std::size_t>(j)].remapped(xu_map);
      g.add_linear_term(dims_.state_offset(i) + j, 1.0);
      g.add_linear_term(dims_.state_offset(i + 1) + j, -1.0);
      const ProjectorKind kind = g.projector_kind();
      constraints_.push_back({ConstraintKind::dynamics_defect, i, j, std::move(g), kind});
    }
  }
  std::vector<int> x_map(static_cast<std::size_t>(n));
  for (int i = 0; i < dims_.T; ++i) {
    for (int k = 0; k < n; ++k) x_map[static_cast<std::size_t>(k)] = dims_.state_offset(i) + k;
    for (int j = 0; j < dims_.s; ++j) {
      ConvexFunction h = state_constraints_.components[static_cast<std::size_t>(j)].remapped(x_map);
      const ProjectorKind kind = h.projector_kind();
      constraints_.push_back({ConstraintKind::state_constraint, i, j, std::move(h), kind});
    }
  }
  objective_terms_ = objective_.terms(dims_);
  objective_constant_ = objective_.constant_value(dims_);
  dynamics_affine_ = dynamics_.is_affine();
}

double OptimalControlProblem::objective_value(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != dims_.num_vars())
    throw ScvxError(ErrorCode::dimension_mismatch, "y has wrong length");
  double v = objective_constant_;
  for (const auto& t : objective_terms_) v += t.eval(y);
  return v;
}

namespace {

std::span<const double> as_span(const Eigen::VectorXd& y) {
  return {y.data(), static_cast<std::size_t>(y.size())};
}

void check_length(const OptimalControlProblem& problem, const Eigen::VectorXd& y) {
  if (y.size() != problem.dims().num_vars())
    throw ScvxError(ErrorCode::dimension_mismatch, "y has wrong length");
}

}  // namespace

Eigen::VectorXd eval_g(const OptimalControlProblem& problem, const Eigen::VectorXd& y) {
  check_length(problem, y);
  const int rows = problem.dims().num_dynamics_rows();
  Eigen::VectorXd g(rows);
  for (int r = 0; r < rows; ++r) g[r] = problem.constraints()[static_cast<std::size_t>(r)].eval(as_span(y));
  return g;
}

Eigen::VectorXd eval_h(const OptimalControlProblem& problem, const Eigen::VectorXd& y) {
  check_length(problem, y);
  const int first = problem.dims().num_dynamics_rows();
  const int M = problem.dims().num_constraints();
  Eigen::VectorXd h(M - first);
  for (int r = first; r < M; ++r) h[r - first] = problem.constraints()[static_cast<std::size_t>(r)].eval(as_span(y));
  return h;
}

Eigen::VectorXd eval_q(const OptimalControlProblem& problem, const Eigen::VectorXd& y) {
  check_length(problem, y);
  const int M = problem.dims().num_constraints();
  Eigen::VectorXd q(M);
  for (int r = 0; r < M; ++r) q[r] = problem.constraints()[static_cast<std::size_t>(r)].eval(as_span(y));
  return q;
}

Eigen::MatrixXd jacobian_q(const OptimalControlProblem& problem, const Eigen::VectorXd& y) {
  check_length(problem, y);
  const int M = problem.dims().num_constraints();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(M, problem.dims().num_vars());
  for (int r = 0; r < M; ++r) {
    const auto& fn = problem.constraints()[static_cast<std::size_t>(r)].fn;
    const Eigen::VectorXd g = fn.local_gradient(as_span(y), r);
    for (std::size_t k = 0; k < fn.support.size(); ++k) J(r, fn.support[k]) += g[static_cast<Eigen::Index>(k)];
  }
  return J;
}

double feasibility_margin(const OptimalControlProblem& problem, const Eigen::VectorXd& y) {
  const Eigen::VectorXd q = eval_q(problem, y);
  return q.size() == 0 ? std::numeric_limits<double>::infinity() : q.minCoeff();
}

void check_sampled_convexity(const OptimalControlProblem& problem, std::span<const Eigen::VectorXd> a,
                             std::span<const Eigen::VectorXd> b, double tol) {
  if (a.size() != b.size()) throw ScvxError(ErrorCode::dimension_mismatch, "sample lists differ in length");
  const auto& cons = problem.constraints();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Eigen::VectorXd mid = 0.5 * (a[k] + b[k]);
    for (std::size_t j = 0; j < cons.size(); ++j) {
      const double lhs = cons[j].eval(as_span(mid));
      const double rhs = 0.5 * cons[j].eval(as_span(a[k])) + 0.5 * cons[j].eval(as_span(b[k]));
      if (lhs > rhs + tol)
        throw ScvxError(ErrorCode::non_convex, "midpoint convexity check failed", static_cast<int>(j));
    }
    const double lhs = problem.objective_value(as_span(mid));
    const double rhs = 0.5 * problem.objective_value(as_span(a[k])) + 0.5 * problem.objective_value(as_span(b[k]));
    if (lhs > rhs + tol) throw ScvxError(ErrorCode::non_convex, "objective midpoint check failed");
  }
}

}  // namespace scvx
