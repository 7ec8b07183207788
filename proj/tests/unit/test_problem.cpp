#include <cmath>
#include <random>

#include "doctest.h"
#include "scvx/error.hpp"
#include "scvx/problem.hpp"
#include "scvx/quadrotor.hpp"
#include "support/toy_problems.hpp"

using namespace scvx;

namespace {

std::span<const double> view(const Eigen::VectorXd& y) { return {y.data(), static_cast<std::size_t>(y.size())}; }

OptimalControlProblem single_integrator(double dt) {
  const ProblemDims dims = ProblemDims::make(1, 1, 2, 0);
  DynamicsModel dyn;
  dyn.components.push_back(ConvexFunction::affine({0, 1}, Eigen::Vector2d(0.0, dt), 0.0));
  BaseSet base;
  for (int i = 0; i < 2; ++i) base.boxes.push_back({Block::state, i, 0, -5.0, 5.0});
  base.boxes.push_back({Block::control, 0, 0, -5.0, 5.0});
  return OptimalControlProblem(dims, std::move(dyn), {}, std::move(base), Objective::min_fuel());
}

}  // namespace

TEST_CASE("counting identities") {
  for (int n = 1; n <= 4; ++n)
    for (int m = 1; m <= 3; ++m)
      for (int T = 2; T <= 6; ++T)
        for (int s = 0; s <= 2; ++s) {
          const auto d = ProblemDims::make(n, m, T, s);
          CHECK(d.num_vars() == m * (T - 1) + n * T);
          CHECK(d.num_constraints() == s * T + n * (T - 1));
        }
  CHECK(ProblemDims::make(6, 3, 25, 2).num_vars() == 222);
  CHECK(ProblemDims::make(6, 3, 25, 2).num_constraints() == 50 + 144);
  CHECK_THROWS_AS(ProblemDims::make(1, 1, 1, 0), ScvxError);
  CHECK_THROWS_AS(ProblemDims::make(0, 1, 2, 0), ScvxError);
}

TEST_CASE("stack layout examples") {
  const auto y1 = stack(ProblemDims::make(1, 1, 2, 0), {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0)},
                        {Eigen::VectorXd::Constant(1, 3.0)});
  CHECK(y1.values() == Eigen::Vector3d(1.0, 2.0, 3.0));
  const auto y2 = stack(ProblemDims::make(2, 1, 2, 0), {Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(3.0, 4.0)},
                        {Eigen::VectorXd::Constant(1, 5.0)});
  Eigen::VectorXd want(5);
  want << 1, 2, 3, 4, 5;
  CHECK(y2.values() == want);
}

TEST_CASE("stack names the offending entry") {
  const auto dims = ProblemDims::make(2, 1, 3, 0);
  std::vector<Eigen::VectorXd> states(3, Eigen::Vector2d::Zero());
  std::vector<Eigen::VectorXd> controls(2, Eigen::VectorXd::Zero(1));
  states[1] = Eigen::Vector3d::Zero();
  try {
    stack(dims, states, controls);
    FAIL("expected a dimension error");
  } catch (const ScvxError& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
    CHECK(e.index() == 1);
  }
  states[1] = Eigen::Vector2d::Zero();
  controls[1] = Eigen::Vector2d::Zero();
  try {
    stack(dims, states, controls);
    FAIL("expected a dimension error");
  } catch (const ScvxError& e) {
    CHECK(e.index() == 3 + 1);
  }
}

TEST_CASE("stack/unstack round trip") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dims = ProblemDims::make(1 + trial % 4, 1 + trial % 3, 2 + trial % 5, 0);
    std::vector<Eigen::VectorXd> states, controls;
    for (int i = 0; i < dims.T; ++i) states.push_back(Eigen::VectorXd::NullaryExpr(dims.n, [&] { return g(rng); }));
    for (int i = 0; i + 1 < dims.T; ++i) controls.push_back(Eigen::VectorXd::NullaryExpr(dims.m, [&] { return g(rng); }));
    const Trajectory t = unstack(stack(dims, states, controls));
    for (int i = 0; i < dims.T; ++i) CHECK(t.states[static_cast<std::size_t>(i)] == states[static_cast<std::size_t>(i)]);
    for (int i = 0; i + 1 < dims.T; ++i) CHECK(t.controls[static_cast<std::size_t>(i)] == controls[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("dynamics defect examples") {
  // f = 0 with a constant state has no defect.
  const auto disk = testing::disk_problem();
  CHECK(eval_g(disk, testing::disk_point({2.0, 0.5}, 0.3)).norm() == 0.0);
  // Single integrator x2 = x1 + u dt propagates exactly.
  const auto si = single_integrator(1.0);
  CHECK(eval_g(si, Eigen::Vector3d(0.0, 1.0, 1.0)).norm() == 0.0);
  CHECK(eval_g(si, Eigen::Vector3d(0.0, 1.0, 2.0))[0] == doctest::Approx(1.0));
  // s = 0 means q = g.
  CHECK(eval_q(si, Eigen::Vector3d(0.5, 1.0, 2.0)) == eval_g(si, Eigen::Vector3d(0.5, 1.0, 2.0)));
}

TEST_CASE("constraint vector order and boundary value") {
  const auto disk = testing::disk_problem();
  const Eigen::VectorXd y = testing::disk_point({0.6, 0.8});
  const Eigen::VectorXd q = eval_q(disk, y);
  REQUIRE(q.size() == 4);
  CHECK(q.head(2).norm() == 0.0);
  CHECK(std::fabs(q[2]) <= 1e-15);
  CHECK(disk.constraints()[2].kind == ConstraintKind::state_constraint);
  CHECK(disk.constraints()[0].kind == ConstraintKind::dynamics_defect);
  CHECK(disk.constraints()[3].step == 1);
}

TEST_CASE("jacobian examples") {
  const auto si = single_integrator(0.5);
  const Eigen::MatrixXd J = jacobian_q(si, Eigen::Vector3d(0.3, -0.2, 0.9));
  // g = x1 + 0.5 u - x2
  CHECK(J(0, 0) == 1.0);
  CHECK(J(0, 1) == -1.0);
  CHECK(J(0, 2) == 0.5);

  const auto disk = testing::disk_problem(2.0);
  const Eigen::MatrixXd Jd = jacobian_q(disk, testing::disk_point({3.0, 4.0}));
  CHECK(Jd(2, 0) == doctest::Approx(0.6));
  CHECK(Jd(2, 1) == doctest::Approx(0.8));
  CHECK(Jd(3, 2) == doctest::Approx(0.6));

  try {
    jacobian_q(disk, testing::disk_point({0.0, 0.0}));
    FAIL("expected a singularity");
  } catch (const ScvxError& e) {
    CHECK(e.code() == ErrorCode::norm_singularity);
    CHECK(e.index() == 2);
  }
}

TEST_CASE("benchmark dynamics match a dense ZOH oracle") {
  const QuadrotorModel model = build_quadrotor_problem(builtin_quadrotor());
  const double dt = 15.0 / 24.0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(6, 6);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 3);
  for (int c = 0; c < 3; ++c) {
    A(c, 3 + c) = dt;
    B(c, c) = dt * dt / 2.0;
    B(3 + c, c) = dt;
  }
  const Eigen::Vector3d grav(0.0, 0.0, -9.81);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd y = testing::random_quadrotor_point(model, rng);
    const Trajectory t = unstack(StackedVariable(model.problem.dims(), y));
    const Eigen::VectorXd g = eval_g(model.problem, y);
    for (int i = 0; i < 24; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const Eigen::VectorXd want = A * t.states[ii] + B * (t.controls[ii] + grav) - t.states[ii + 1];
      CHECK((g.segment(6 * i, 6) - want).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
}

TEST_CASE("analytic gradients match central differences on the benchmark") {
  const QuadrotorModel model = build_quadrotor_problem(builtin_quadrotor());
  const auto& rows = model.problem.constraints();
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd y = testing::random_quadrotor_point(model, rng);
    const Eigen::MatrixXd J = jacobian_q(model.problem, y);
    for (std::size_t j = 0; j < rows.size(); ++j)
      for (int k : rows[j].fn.support) {
        const double h = 1e-6 * std::max(1.0, std::fabs(y[k]));
        const double saved = y[k];
        y[k] = saved + h;
        const double up = rows[j].eval(view(y));
        y[k] = saved - h;
        const double down = rows[j].eval(view(y));
        y[k] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double analytic = J(static_cast<Eigen::Index>(j), k);
        worst = std::max(worst, std::fabs(fd - analytic) / std::max(1.0, std::fabs(analytic)));
      }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("benchmark constraints pass the sampled midpoint check") {
  const QuadrotorModel model = build_quadrotor_problem(builtin_quadrotor());
  std::mt19937_64 rng(6);
  std::vector<Eigen::VectorXd> a, b;
  for (int k = 0; k < 1000; ++k) {
    a.push_back(testing::random_quadrotor_point(model, rng));
    b.push_back(testing::random_quadrotor_point(model, rng));
  }
  CHECK_NOTHROW(check_sampled_convexity(model.problem, a, b));
}

TEST_CASE("indefinite quadratic component is rejected") {
  const ProblemDims dims = ProblemDims::make(1, 1, 2, 1);
  DynamicsModel dyn;
  dyn.components.push_back(ConvexFunction::affine({0, 1}, Eigen::Vector2d(0.0, 1.0), 0.0));
  StateConstraintModel h;
  ConvexFunction bad = ConvexFunction::affine({0}, Eigen::VectorXd::Zero(1), 0.0);
  bad.quadratic = -Eigen::MatrixXd::Identity(1, 1);
  h.components.push_back(bad);
  CHECK_THROWS_AS(OptimalControlProblem(dims, dyn, h, {}, Objective::min_fuel()), ScvxError);
}

TEST_CASE("base set membership") {
  const QuadrotorModel model = build_quadrotor_problem(builtin_quadrotor());
  const Eigen::VectorXd guess = straight_line_guess(model);
  CHECK(model.problem.base_set().max_violation(model.problem.dims(), view(guess)) <= 1e-12);
  CHECK(model.problem.base_set().is_bounded(model.problem.dims()));
  // Hover everywhere: each control norm equals ||g||.
  const Trajectory t = unstack(StackedVariable(model.problem.dims(), guess));
  for (const auto& u : t.controls) CHECK(u.norm() == doctest::Approx(9.81));
}
