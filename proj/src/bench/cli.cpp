#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "scvx/error.hpp"
#include "scvx/quadrotor.hpp"

namespace scvx {

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitBadInput = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::infeasible_scenario:
    case ErrorCode::infeasible_anchor: return kExitInfeasible;
    case ErrorCode::invalid_argument:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::unsupported_model: return kExitBadInput;
    default: return kExitSolverFailure;
  }
}

struct RunFlags {
  std::filesystem::path out_dir;
  bool no_obstacles = false;
  double epsilon = -1.0;
  int max_iter = 50;
  bool dump_subproblems = false;
  bool quiet = false;
};

// One scenario end to end. Output goes to `log`/`err` so sweep workers do not interleave.
int run_one(QuadrotorScenario scenario, const RunFlags& flags, std::ostream& log, std::ostream& err) {
  try {
    if (flags.no_obstacles) scenario.obstacles.clear();
    BenchmarkOptions options;
    options.epsilon = flags.epsilon;
    options.max_successions = flags.max_iter;
    if (flags.dump_subproblems) options.dump_dir = flags.out_dir / "subproblems";
    const BenchmarkRun run = run_benchmark(scenario, options);
    write_outputs(run, flags.out_dir);
    if (!flags.quiet) print_iteration_table(run, log);
    switch (run.report.status) {
      case ScvxStatus::converged: return kExitConverged;
      case ScvxStatus::max_successions:
        err << "scvx: no convergence within " << flags.max_iter << " successions\n";
        return kExitSolverFailure;
      case ScvxStatus::failed:
        err << "scvx: subproblem " << run.report.failed_solve << " failed: " << run.report.failure_reason << '\n';
        return kExitSolverFailure;
    }
    return kExitSolverFailure;
  } catch (const ScvxError& e) {
    err << "scvx: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "scvx: " << e.what() << '\n';
    return kExitBadInput;
  }
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Successive convexification for the multi-rotor keep-out benchmark"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run the initializer and SCvx on one scenario");

  std::vector<std::string> scenario_paths;
  std::string builtin;
  std::string out_dir = "scvx_out";
  RunFlags flags;
  bool sweep = false;
  run->add_option("scenario", scenario_paths, "Scenario JSON file(s)");
  run->add_option("--builtin", builtin, "Built-in scenario")->check(CLI::IsMember({"quadrotor"}));
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--no-obstacles", flags.no_obstacles, "Drop all keep-out zones");
  run->add_option("--epsilon", flags.epsilon, "Convergence threshold (overrides the scenario)")
      ->check(CLI::PositiveNumber);
  run->add_option("--max-iter", flags.max_iter, "Maximum successions")->check(CLI::PositiveNumber);
  run->add_flag("--dump-subproblems", flags.dump_subproblems, "Write each subproblem as a triplet file");
  run->add_flag("--sweep", sweep, "Run several scenario files concurrently, one output directory each");
  run->add_flag("--quiet", flags.quiet, "Suppress the iteration table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  if (!builtin.empty() && !scenario_paths.empty()) {
    std::cerr << "scvx: give either a scenario file or --builtin, not both\n";
    return kExitBadInput;
  }
  if (builtin.empty() && scenario_paths.empty()) {
    std::cerr << "scvx: a scenario file or --builtin quadrotor is required\n";
    return kExitBadInput;
  }
  if (scenario_paths.size() > 1 && !sweep) {
    std::cerr << "scvx: several scenario files need --sweep\n";
    return kExitBadInput;
  }

  if (!sweep) {
    QuadrotorScenario scenario;
    try {
      scenario = builtin.empty() ? load_scenario(scenario_paths.front()) : builtin_quadrotor();
    } catch (const ScvxError& e) {
      std::cerr << "scvx: " << e.what() << '\n';
      return kExitBadInput;
    }
    flags.out_dir = out_dir;
    return run_one(scenario, flags, std::cout, std::cerr);
  }

  // Sweep: isolated reports under <out>/<scenario stem>, results printed in input order.
  std::vector<int> codes(scenario_paths.size(), kExitBadInput);
  std::vector<std::ostringstream> logs(scenario_paths.size()), errs(scenario_paths.size());
  std::vector<std::thread> workers;
  for (std::size_t k = 0; k < scenario_paths.size(); ++k)
    workers.emplace_back([&, k] {
      RunFlags local = flags;
      local.out_dir = std::filesystem::path(out_dir) / std::filesystem::path(scenario_paths[k]).stem();
      try {
        codes[k] = run_one(load_scenario(scenario_paths[k]), local, logs[k], errs[k]);
      } catch (const ScvxError& e) {
        errs[k] << "scvx: " << e.what() << '\n';
        codes[k] = kExitBadInput;
      }
    });
  for (auto& w : workers) w.join();
  int worst = kExitConverged;
  for (std::size_t k = 0; k < scenario_paths.size(); ++k) {
    std::cout << "== " << scenario_paths[k] << " (exit " << codes[k] << ")\n" << logs[k].str();
    std::cerr << errs[k].str();
    worst = std::max(worst, codes[k]);
  }
  return worst;
}

}  // namespace scvx
