#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "scvx/conic.hpp"
#include "support/random_socp.hpp"

using namespace scvx;

namespace {

ConicProgram make(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  std::vector<Cone> cones) {
  ConicProgram p;
  p.c = c;
  p.A = A.sparseView();
  p.b = b;
  p.cones = std::move(cones);
  return p;
}

}  // namespace

TEST_CASE("active lower bound") {
  // min x s.t. x - 1 >= 0, written as -x + s = -1
  const auto p = make(Eigen::VectorXd::Ones(1), -Eigen::MatrixXd::Ones(1, 1), -Eigen::VectorXd::Ones(1),
                      {{ConeKind::nonneg, 1}});
  const auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("norm epigraph") {
  // min t s.t. (t, 3, 4) in SOC
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 1);
  A(0, 0) = -1.0;
  Eigen::VectorXd b(3);
  b << 0.0, 3.0, 4.0;
  const auto sol = solve(make(Eigen::VectorXd::Ones(1), A, b, {{ConeKind::soc, 3}}));
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x[0] == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("equality dual sign") {
  // min x1 + x2 s.t. x1 + x2 = 1, x >= 0
  Eigen::MatrixXd A(3, 2);
  A << 1, 1, -1, 0, 0, -1;
  Eigen::VectorXd b(3);
  b << 1, 0, 0;
  const auto sol = solve(make(Eigen::VectorXd::Ones(2), A, b, {{ConeKind::zero, 1}, {ConeKind::nonneg, 2}}));
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x.sum() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.z[0] == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(sol.x.minCoeff() >= -1e-8);
}

TEST_CASE("perturbing x raises the primal residual") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 1);
  A(0, 0) = -1.0;
  Eigen::VectorXd b(3);
  b << 0.0, 3.0, 4.0;
  const auto p = make(Eigen::VectorXd::Ones(1), A, b, {{ConeKind::soc, 3}});
  auto sol = solve(p);
  const auto before = residuals(p, sol);
  sol.x[0] += 1e-2;
  const auto after = residuals(p, sol);
  CHECK(after.primal == doctest::Approx(before.primal + 1e-2 / (1.0 + 5.0)).epsilon(1e-4));
}

TEST_CASE("primal infeasible program is flagged") {
  // x >= 1 and x <= 0
  Eigen::MatrixXd A(2, 1);
  A << -1, 1;
  Eigen::VectorXd b(2);
  b << -1, 0;
  const auto sol = solve(make(Eigen::VectorXd::Zero(1), A, b, {{ConeKind::nonneg, 2}}));
  CHECK(sol.status == SolveStatus::primal_infeasible);
}

TEST_CASE("unbounded program is flagged dual infeasible") {
  // min -x s.t. x >= 0
  const auto sol = solve(make(-Eigen::VectorXd::Ones(1), -Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1),
                              {{ConeKind::nonneg, 1}}));
  CHECK(sol.status == SolveStatus::dual_infeasible);
}

TEST_CASE("random feasible-by-construction programs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = testing::random_socp(rng);
    const auto sol = solve(inst.program);
    CAPTURE(trial);
    REQUIRE(sol.status == SolveStatus::optimal);
    const auto r = residuals(inst.program, sol);
    CHECK(r.primal <= 1e-8);
    CHECK(r.dual <= 1e-8);
    CHECK(r.gap <= 1e-8);
    // Duality sandwich, with the slack measured like the normalized gap.
    const double pcost = inst.program.c.dot(sol.x);
    CHECK(pcost >= -inst.program.b.dot(sol.z) - 2e-8 * (1.0 + std::fabs(pcost)));
    CHECK(std::fabs(inst.program.c.dot(sol.x) - inst.optimal_value) <= 1e-6 * (1.0 + std::fabs(inst.optimal_value)));
  }
}

TEST_CASE("scaling the cost leaves the optimal point unchanged") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testing::random_socp(rng);
    const auto a = solve(inst.program);
    inst.program.c *= 3.5;
    const auto b = solve(inst.program);
    REQUIRE(a.status == SolveStatus::optimal);
    REQUIRE(b.status == SolveStatus::optimal);
    // The optimum need not be unique; compare objective values instead of
    // points when the optimal face is not a vertex.
    CHECK(std::fabs(3.5 * inst.program.c.dot(a.x) / 3.5 - inst.program.c.dot(b.x)) <=
          1e-6 * (1.0 + std::fabs(inst.program.c.dot(b.x))));
  }
}

TEST_CASE("solves are deterministic") {
  std::mt19937_64 rng(3);
  const auto inst = testing::random_socp(rng);
  const auto a = solve(inst.program);
  const auto b = solve(inst.program);
  CHECK(a.iterations == b.iterations);
  CHECK(a.x == b.x);
  CHECK(a.z == b.z);
}

TEST_CASE("triplet dump round-trips") {
  std::mt19937_64 rng(5);
  const auto inst = testing::random_socp(rng);
  std::stringstream ss;
  write_triplets(inst.program, ss);
  const auto back = read_triplets(ss);
  CHECK(back.c == inst.program.c);
  CHECK(back.b == inst.program.b);
  CHECK(Eigen::MatrixXd(back.A) == Eigen::MatrixXd(inst.program.A));
  CHECK(back.cones.size() == inst.program.cones.size());
}
