// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when any
// fails. Tolerances are fixed here and not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scvx/conic.hpp"
#include "scvx/driver.hpp"
#include "scvx/linearizer.hpp"
#include "scvx/projector.hpp"
#include "scvx/quadrotor.hpp"
#include "support/projection_oracles.hpp"
#include "support/random_socp.hpp"
#include "support/toy_problems.hpp"

using namespace scvx;

namespace {

constexpr double kCostLow = 242.9;
constexpr double kCostHigh = 247.8;
constexpr int kMaxSuccessions = 10;
constexpr double kMarginTol = 1e-7;
constexpr double kDefectTol = 1e-7;
constexpr double kPinTol = 1e-7;
constexpr double kBaseTol = 1e-7;
constexpr double kRuntimeLimit = 10.0;
constexpr double kMonotoneTol = 1e-9;
constexpr double kSampleTol = 1e-8;
constexpr int kRegionSamples = 10000;
constexpr double kFixedPointTol = 1e-6;
constexpr double kProjectorAgreement = 1e-6;
constexpr double kGridAgreement = 2e-3;
constexpr double kNonExpansiveSlack = 1e-9;
constexpr double kResidualTol = 1e-8;
constexpr double kHandWorkedTol = 1e-7;
constexpr double kConvexMatch = 1e-7;
constexpr double kGradientTol = 1e-5;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

const PenaltyConfig kEquality{0.0, PenaltyMode::equality};

struct Benchmark {
  BenchmarkRun run;
  double seconds = 0.0;
};

Benchmark& benchmark() {
  static Benchmark b = [] {
    const auto t0 = std::chrono::steady_clock::now();
    BenchmarkRun run = run_benchmark(builtin_quadrotor());
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Benchmark{std::move(run), s};
  }();
  return b;
}

void benchmark_reproduction(Outcome& o) {
  const Benchmark& b = benchmark();
  const auto& r = b.run.report;
  const auto& s = b.run.summary;
  o.require(r.status == ScvxStatus::converged, "converged");
  o.require(s.final_cost >= kCostLow && s.final_cost <= kCostHigh, "cost band");
  o.require(r.successions <= kMaxSuccessions, "succession count");
  o.require(s.obstacle_rows == 50, "50 obstacle margins");
  o.require(s.min_obstacle_margin >= -kMarginTol, "obstacle margins");
  o.require(s.max_dynamics_defect <= kDefectTol, "dynamics defect");
  o.require(s.max_pin_error <= kPinTol, "endpoint pins");
  o.require(b.seconds < kRuntimeLimit, "runtime");
  o.detail << " cost=" << s.final_cost << " successions=" << r.successions
           << " feasibility_solves=" << b.run.init.cone_solves << " min_margin=" << s.min_obstacle_margin
           << " defect=" << s.max_dynamics_defect << " pins=" << s.max_pin_error << " seconds=" << b.seconds;
}

void monotone_decrease(Outcome& o) {
  const auto& P = benchmark().run.report.penalty_values;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < P.size(); ++k) worst = std::max(worst, P[k] - P[k - 1]);
  o.require(P.size() >= 2, "at least one succession");
  o.require(worst <= kMonotoneTol, "P(z^{k+1}) <= P(z^k) + tol");
  o.detail << " steps=" << P.size() - 1 << " max_increase=" << worst;
}

void recursive_feasibility(Outcome& o) {
  const auto& run = benchmark().run;
  const auto& r = run.report;
  double worst_margin = std::numeric_limits<double>::infinity(), worst_base = 0.0;
  for (std::size_t k = 0; k < r.iterates.size(); ++k) {
    worst_margin = std::min(worst_margin, r.feasibility_margins[k]);
    worst_base = std::max(worst_base, r.base_violations[k]);
  }
  o.require(worst_margin >= -kMarginTol, "iterate margins");
  o.require(worst_base <= kBaseTol, "base-set membership");
  const auto region = build_feasible_region(run.model.problem, r.iterates.front(), kEquality);
  const auto inv = verify_invariance(run.model.problem, region, kEquality, kRegionSamples, 1);
  o.require(inv.anchor_inside, "anchor in F_z0");
  o.require(inv.samples == kRegionSamples, "sample count");
  o.require(inv.worst_margin >= -kSampleTol, "sampled q >= -1e-8");
  o.detail << " min_iterate_margin=" << worst_margin << " max_base_violation=" << worst_base
           << " samples=" << inv.samples << " worst_sample_margin=" << inv.worst_margin;
}

void fixed_point(Outcome& o) {
  const auto& run = benchmark().run;
  o.require(run.report.status == ScvxStatus::converged, "converged");
  ScvxConfig config;
  const Eigen::VectorXd& z_star = run.report.final_iterate();
  const double residual = fixed_point_residual(run.model.problem, z_star, config);
  o.require(residual < kFixedPointTol, "P(z*) - Phi(z*) < 1e-6");
  const SolveReport again = scvx::scvx(run.model.problem, z_star, config);
  o.require(again.status == ScvxStatus::converged && again.successions == 0, "restart stops at the first succession");
  o.detail << " residual=" << residual << " restart_successions=" << again.successions;
}

void projection_correctness(Outcome& o) {
  using namespace scvx::testing;
  std::mt19937_64 rng(101);
  double agreement = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ConvexFunction fn = k % 3 == 0 ? random_ball(rng, 2 + k % 4)
                              : k % 3 == 1 ? random_cylinder(rng)
                                           : random_halfspace(rng, 1 + k % 5);
    const Eigen::VectorXd z = random_point(rng, fn.support_size());
    agreement = std::max(agreement, (project(fn, z).point - project_generic(fn, z).point).norm());
  }
  o.require(agreement <= kProjectorAgreement, "analytic vs conic");

  double grid = 0.0;
  for (int k = 0; k < 20; ++k) {
    const ConvexFunction fn = k % 2 == 0 ? random_ball(rng, 2) : random_halfspace(rng, 2);
    Eigen::Vector2d z;
    do {
      z = random_point(rng, 2, 1.5);
    } while (fn.eval(view(z)) <= 0.0);
    const auto r = project(fn, z);
    const Eigen::Vector2d g = grid_projection(fn, z, r.distance + 0.5);
    grid = std::max(grid, std::fabs((g - z).norm() - r.distance));
  }
  o.require(grid <= kGridAgreement, "grid-search oracle");

  double expansion = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const ConvexFunction fn = k % 3 == 0 ? random_ball(rng, 3) : k % 3 == 1 ? random_cylinder(rng)
                                                                           : random_halfspace(rng, 3);
    const Eigen::VectorXd a = random_point(rng, 3), b = random_point(rng, 3);
    expansion = std::max(expansion, (project(fn, a).point - project(fn, b).point).norm() - (a - b).norm());
  }
  o.require(expansion <= kNonExpansiveSlack, "non-expansive");
  o.detail << " max_disagreement=" << agreement << " max_grid_distance_gap=" << grid
           << " max_expansion=" << expansion;
}

ConicProgram dense_program(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           std::vector<Cone> cones) {
  ConicProgram p;
  p.c = c;
  p.A = A.sparseView();
  p.b = b;
  p.cones = std::move(cones);
  return p;
}

void conic_solver(Outcome& o) {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int optimal = 0;
  for (int k = 0; k < 200; ++k) {
    const auto inst = testing::random_socp(rng);
    const auto sol = solve(inst.program);
    if (sol.status != SolveStatus::optimal) continue;
    ++optimal;
    const Residuals r = residuals(inst.program, sol);
    worst = std::max({worst, r.primal, r.dual, r.gap});
  }
  o.require(optimal == 200, "all random programs optimal");
  o.require(worst <= kResidualTol, "normalized residuals");

  // x >= 1
  const auto bound = solve(dense_program(Eigen::VectorXd::Ones(1), -Eigen::MatrixXd::Ones(1, 1),
                                         -Eigen::VectorXd::Ones(1), {{ConeKind::nonneg, 1}}));
  o.require(bound.status == SolveStatus::optimal && std::fabs(bound.x[0] - 1.0) <= kHandWorkedTol, "x >= 1");
  // (t, 3, 4) in SOC
  Eigen::MatrixXd A2 = Eigen::MatrixXd::Zero(3, 1);
  A2(0, 0) = -1.0;
  const auto epi = solve(dense_program(Eigen::VectorXd::Ones(1), A2, Eigen::Vector3d(0.0, 3.0, 4.0), {{ConeKind::soc, 3}}));
  o.require(epi.status == SolveStatus::optimal && std::fabs(epi.x[0] - 5.0) <= kHandWorkedTol, "t = 5");
  // x1 + x2 = 1, x >= 0
  Eigen::MatrixXd A3(3, 2);
  A3 << 1.0, 1.0, -1.0, 0.0, 0.0, -1.0;
  const auto split = solve(dense_program(Eigen::VectorXd::Ones(2), A3, Eigen::Vector3d(1.0, 0.0, 0.0),
                                         {{ConeKind::zero, 1}, {ConeKind::nonneg, 2}}));
  o.require(split.status == SolveStatus::optimal && std::fabs(split.primal_objective - 1.0) <= kHandWorkedTol &&
                std::fabs(split.z[0] + 1.0) <= kHandWorkedTol,
            "equality dual -1");

  std::mt19937_64 again(7);
  const auto inst = testing::random_socp(again);
  const auto s1 = solve(inst.program), s2 = solve(inst.program);
  const bool identical = s1.iterations == s2.iterations && s1.x == s2.x && s1.z == s2.z && s1.s == s2.s;
  o.require(identical, "bitwise determinism");
  o.detail << " optimal=" << optimal << "/200 max_residual=" << worst;
}

void convex_degeneration(Outcome& o) {
  auto s = builtin_quadrotor();
  s.obstacles.clear();
  const BenchmarkRun run = run_benchmark(s);
  const double direct = convex_relaxation_floor(run.model.problem, kEquality);
  o.require(run.report.status == ScvxStatus::converged, "converged");
  o.require(run.report.successions == 1, "exactly one succession");
  o.require(std::fabs(run.summary.final_cost - direct) <= kConvexMatch, "matches the direct solve");
  o.detail << " successions=" << run.report.successions << " cost=" << run.summary.final_cost
           << " direct=" << direct;
}

void gradient_suite(Outcome& o) {
  const QuadrotorModel model = build_quadrotor_problem(builtin_quadrotor());
  const auto& rows = model.problem.constraints();
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd y = testing::random_quadrotor_point(model, rng);
    const Eigen::MatrixXd J = jacobian_q(model.problem, y);
    for (std::size_t j = 0; j < rows.size(); ++j)
      for (int k : rows[j].fn.support) {
        const double h = 1e-6 * std::max(1.0, std::fabs(y[k]));
        const double saved = y[k];
        y[k] = saved + h;
        const double up = rows[j].eval(testing::view(y));
        y[k] = saved - h;
        const double down = rows[j].eval(testing::view(y));
        y[k] = saved;
        const double analytic = J(static_cast<Eigen::Index>(j), k);
        worst = std::max(worst, std::fabs((up - down) / (2.0 * h) - analytic) / std::max(1.0, std::fabs(analytic)));
      }
  }
  o.require(worst <= kGradientTol, "central differences");
  o.detail << " points=100 max_relative_error=" << worst;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"quadrotor benchmark reproduction", benchmark_reproduction},
      {"monotone decrease", monotone_decrease},
      {"recursive feasibility", recursive_feasibility},
      {"fixed-point certificate", fixed_point},
      {"projection correctness", projection_correctness},
      {"conic solver", conic_solver},
      {"convex degeneration", convex_degeneration},
      {"gradient suite", gradient_suite},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    o.detail.precision(10);
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s %s:%s\n", o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
