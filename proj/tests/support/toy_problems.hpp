#pragma once

// Small problems shared by the unit tests.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "scvx/problem.hpp"
#include "scvx/quadrotor.hpp"

namespace scvx::testing {

/// n = 2, m = 1, T = 2 with x_2 = x_1 (zero dynamics) and the keep-out disk
/// ||x_i|| >= 1 at both steps. States are boxed to [-3, 3], the control to [-1, 1].
inline OptimalControlProblem disk_problem(double radius = 1.0) {
  const ProblemDims dims = ProblemDims::make(2, 1, 2, 1);
  DynamicsModel dyn;
  for (int r = 0; r < 2; ++r) dyn.components.push_back(ConvexFunction::affine({0, 1, 2}, Eigen::Vector3d::Zero(), 0.0));
  StateConstraintModel h;
  h.components.push_back(ConvexFunction::norm({0, 1}, Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), 1.0, -radius));
  BaseSet base;
  for (int i = 0; i < 2; ++i)
    for (int c = 0; c < 2; ++c) base.boxes.push_back({Block::state, i, c, -3.0, 3.0});
  base.boxes.push_back({Block::control, 0, 0, -1.0, 1.0});
  return OptimalControlProblem(dims, std::move(dyn), std::move(h), std::move(base), Objective::min_fuel());
}

/// y for the disk problem with both states at p and control u.
inline Eigen::VectorXd disk_point(const Eigen::Vector2d& p, double u = 0.0) {
  Eigen::VectorXd y(5);
  y << p, p, u;
  return y;
}

/// Random point of the benchmark's Y (pins ignored): positions in the box,
/// speeds below V_max, controls inside the thrust cone and the acceleration ball.
inline Eigen::VectorXd random_quadrotor_point(const QuadrotorModel& model, std::mt19937_64& rng,
                                              double position_range = 12.0) {
  const auto& s = model.scenario;
  const ProblemDims& dims = model.problem.dims();
  std::uniform_real_distribution<double> pos(-position_range, position_range);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_direction = [&] {
    Eigen::Vector3d d(g(rng), g(rng), g(rng));
    return Eigen::Vector3d(d / d.norm());
  };
  std::vector<Eigen::VectorXd> states, controls;
  for (int i = 0; i < dims.T; ++i) {
    Eigen::VectorXd x(6);
    x << pos(rng), pos(rng), pos(rng), s.V_max * unit(rng) * random_direction();
    states.push_back(x);
  }
  const double cos_theta = std::cos(s.theta_cone * 3.14159265358979323846 / 180.0);
  for (int i = 0; i + 1 < dims.T; ++i) {
    // A direction within the cone around n_hat, scaled into the ball.
    Eigen::Vector3d d = s.n_hat + 0.5 * std::sqrt(1.0 - cos_theta * cos_theta) * random_direction();
    d.normalize();
    controls.push_back(s.u_max * (0.05 + 0.9 * unit(rng)) * d);
  }
  return stack(dims, states, controls).values();
}

/// Trajectory with g = 0: x_0 = (p0, v0) propagated under the given controls.
inline Eigen::VectorXd simulate(const QuadrotorModel& model, const std::vector<Eigen::Vector3d>& controls) {
  const ProblemDims& dims = model.problem.dims();
  std::vector<Eigen::VectorXd> states, us;
  Eigen::VectorXd x(6);
  x << model.scenario.p0, model.scenario.v0;
  states.push_back(x);
  for (int i = 0; i + 1 < dims.T; ++i) {
    const Eigen::Vector3d& u = controls[static_cast<std::size_t>(i)];
    x = model.A * x + model.B * (u + model.scenario.g_vec);
    states.push_back(x);
    us.push_back(u);
  }
  return stack(dims, states, us).values();
}

}  // namespace scvx::testing
