#pragma once

// Multi-rotor minimum-fuel benchmark: double-integrator dynamics with
// zero-order-hold control, speed/acceleration/thrust-cone limits and
// cylindrical keep-out zones.

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scvx/driver.hpp"
#include "scvx/problem.hpp"

namespace scvx {

struct Obstacle {
  Eigen::Vector2d center;
  double radius = 0.0;
};

struct QuadrotorScenario {
  int N = 25;
  double t_f = 15.0;
  double V_max = 2.0;
  double u_max = 13.33;
  Eigen::Vector3d g_vec{0.0, 0.0, -9.81};
  double theta_cone = 30.0;  // degrees
  Eigen::Vector3d n_hat{0.0, 0.0, 1.0};
  Eigen::Vector3d p0{-8.0, -1.0, 0.0};
  Eigen::Vector3d v0{0.0, 0.0, 0.0};
  Eigen::Vector3d pf{8.0, 1.0, 0.5};
  Eigen::Vector3d vf{0.0, 0.0, 0.0};
  std::vector<Obstacle> obstacles{{{-1.0, 0.0}, 3.0}, {{4.0, -1.0}, 1.5}};
  double lambda = 0.0;
  double epsilon = 1e-6;
  double position_bound = 50.0;  // |p_k| box that keeps Y compact

  double dt() const { return t_f / (N - 1); }
  /// Throws ScvxError(invalid_argument) for malformed values and
  /// ScvxError(infeasible_scenario) when a pinned state is inside an
  /// obstacle or above the speed limit.
  void validate() const;
};

/// The benchmark parameter set.
QuadrotorScenario builtin_quadrotor();

/// Flat JSON object with the field names of QuadrotorScenario; obstacles are
/// [{"p_c": [x, y], "r": r}, ...]. Missing fields keep the built-in values.
/// Throws ScvxError(invalid_argument) on malformed input.
QuadrotorScenario parse_scenario(const std::string& json_text);
QuadrotorScenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const QuadrotorScenario& scenario);

struct QuadrotorModel {
  QuadrotorScenario scenario;
  OptimalControlProblem problem;
  Eigen::Matrix<double, 6, 6> A;
  Eigen::Matrix<double, 6, 3> B;
  Eigen::Vector3d hold_control;  // terminal control -g_vec, a constant in J
};

/// n = 6 (p, v), m = 3, one state constraint ||H x - p_c|| - r >= 0 per
/// obstacle. The controls u_1..u_{N-1} drive the dynamics; the terminal
/// control holding x_N at rest is fixed to -g_vec and enters J as ||g_vec||.
QuadrotorModel build_quadrotor_problem(const QuadrotorScenario& scenario);

/// Straight-line positions, zero velocities, hover controls.
Eigen::VectorXd straight_line_guess(const QuadrotorModel& model);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3d> velocities;
  std::vector<Eigen::Vector3d> controls;        // N entries; the last is the hold control
  std::vector<std::vector<double>> margins;     // [step][obstacle]
  double cost = 0.0;                            // sum ||u_i|| over N controls
};

TrajectoryRecord make_record(const QuadrotorModel& model, const Eigen::VectorXd& y);

struct BenchmarkSummary {
  double final_cost = 0.0;
  double initial_cost = 0.0;
  double min_obstacle_margin = 0.0;
  double max_dynamics_defect = 0.0;
  double max_pin_error = 0.0;
  double max_base_violation = 0.0;
  int obstacle_rows = 0;
};

BenchmarkSummary summarize(const QuadrotorModel& model, const InitializerReport& init, const SolveReport& report);

struct BenchmarkOptions {
  double epsilon = -1.0;     // < 0: scenario value
  int max_successions = 50;
  int threads = 1;
  SolverSettings solver;
  std::optional<std::filesystem::path> dump_dir;  // subproblem triplet dumps
};

struct BenchmarkRun {
  QuadrotorModel model;
  InitializerReport init;
  SolveReport report;
  BenchmarkSummary summary;
};

/// Initializer then SCvx. Throws ScvxError from the initializer.
BenchmarkRun run_benchmark(const QuadrotorScenario& scenario, const BenchmarkOptions& options = {});

/// report.json body (no wall-clock values, so reruns are byte-identical).
std::string report_json(const BenchmarkRun& run);
void write_outputs(const BenchmarkRun& run, const std::filesystem::path& dir);
void print_iteration_table(const BenchmarkRun& run, std::ostream& out);

/// `scvx run ...` entry point; returns the process exit code
/// (0 converged, 2 infeasible scenario, 3 solver failure, 4 bad input).
int run_cli(int argc, char** argv);

}  // namespace scvx
