#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "scvx/error.hpp"
#include "scvx/quadrotor.hpp"

using namespace scvx;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("scvx_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "scvx");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

ErrorCode parse_error(const std::string& text) {
  try {
    parse_scenario(text).validate();
  } catch (const ScvxError& e) {
    return e.code();
  }
  FAIL("expected an error for " << text);
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("built-in scenario values") {
  const auto s = builtin_quadrotor();
  CHECK(s.N == 25);
  CHECK(s.t_f == 15.0);
  CHECK(s.dt() == 0.625);
  CHECK(s.V_max == 2.0);
  CHECK(s.u_max == 13.33);
  CHECK(s.g_vec == Eigen::Vector3d(0.0, 0.0, -9.81));
  CHECK(s.theta_cone == 30.0);
  CHECK(s.n_hat == Eigen::Vector3d(0.0, 0.0, 1.0));
  REQUIRE(s.obstacles.size() == 2);
  CHECK(s.obstacles[0].center == Eigen::Vector2d(-1.0, 0.0));
  CHECK(s.obstacles[0].radius == 3.0);
  CHECK(s.obstacles[1].center == Eigen::Vector2d(4.0, -1.0));
  CHECK(s.obstacles[1].radius == 1.5);
  CHECK(s.lambda == 0.0);
  CHECK(s.epsilon == 1e-6);
  const auto model = build_quadrotor_problem(s);
  CHECK(model.problem.dims().num_vars() == 222);
  CHECK(model.problem.dims().num_constraints() - model.problem.dims().num_dynamics_rows() == 50);
}

TEST_CASE("scenario JSON round trip") {
  auto s = builtin_quadrotor();
  s.obstacles.push_back({{7.0, 3.0}, 0.25});
  s.epsilon = 1e-5;
  const auto back = parse_scenario(scenario_to_json(s));
  CHECK(scenario_to_json(back) == scenario_to_json(s));
  CHECK(back.obstacles.size() == 3);
  CHECK(back.obstacles[2].radius == 0.25);
  // Missing fields keep the built-in values.
  const auto partial = parse_scenario(R"({"N": 11, "obstacles": []})");
  CHECK(partial.N == 11);
  CHECK(partial.obstacles.empty());
  CHECK(partial.t_f == 15.0);
}

TEST_CASE("scenario validation errors") {
  CHECK(parse_error("{not json") == ErrorCode::invalid_argument);
  CHECK(parse_error("[1, 2]") == ErrorCode::invalid_argument);
  CHECK(parse_error(R"({"N": 2.5})") == ErrorCode::invalid_argument);
  CHECK(parse_error(R"({"velocity": 3})") == ErrorCode::invalid_argument);
  CHECK(parse_error(R"({"p0": [1, 2]})") == ErrorCode::invalid_argument);
  CHECK(parse_error(R"({"N": 1})") == ErrorCode::invalid_argument);
  CHECK(parse_error(R"({"t_f": 0})") == ErrorCode::invalid_argument);
  CHECK(parse_error(R"({"n_hat": [0, 0, 2]})") == ErrorCode::invalid_argument);
  CHECK(parse_error(R"({"obstacles": [{"p_c": [20, 20], "r": 0}]})") == ErrorCode::invalid_argument);
  CHECK(parse_error(R"({"obstacles": [{"p_c": [20, 20]}]})") == ErrorCode::invalid_argument);
  CHECK(parse_error(R"({"obstacles": [{"p_c": [-8, -1], "r": 0.5}]})") == ErrorCode::infeasible_scenario);
  CHECK(parse_error(R"({"u_max": 5})") == ErrorCode::infeasible_scenario);
  CHECK(parse_error(R"({"v0": [3, 0, 0]})") == ErrorCode::infeasible_scenario);
}

TEST_CASE("trajectory record of a hover") {
  auto s = builtin_quadrotor();
  s.obstacles = {{{20.0, 20.0}, 1.0}};
  s.pf = s.p0;
  const auto model = build_quadrotor_problem(s);
  const auto rec = make_record(model, straight_line_guess(model));
  REQUIRE(rec.controls.size() == 25);
  for (const auto& u : rec.controls) CHECK(u.norm() == doctest::Approx(9.81));
  CHECK(rec.cost == doctest::Approx(25 * 9.81));
  CHECK(rec.times.back() == doctest::Approx(15.0));
  CHECK(rec.margins[0][0] == doctest::Approx(std::hypot(28.0, 21.0) - 1.0));
}

TEST_CASE("run writes deterministic outputs") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(cli({"run", "--builtin", "quadrotor", "--out", a.string(), "--quiet"}) == 0);
  REQUIRE(cli({"run", "--builtin", "quadrotor", "--out", b.string(), "--quiet"}) == 0);
  for (const char* f : {"report.json", "trajectory.csv", "ground_track.csv", "path3d.csv", "cost_curve.csv"}) {
    CAPTURE(f);
    REQUIRE(std::filesystem::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const std::string traj = slurp(a / "trajectory.csv");
  CHECK(traj.rfind("t,px,py,pz,vx,vy,vz,ux,uy,uz,margin_1,margin_2\n", 0) == 0);
  CHECK(std::count(traj.begin(), traj.end(), '\n') == 26);
  CHECK(slurp(a / "report.json").find("\"status\": \"converged\"") != std::string::npos);
}

TEST_CASE("CLI exit codes") {
  const auto dir = scratch("exit");
  CHECK(cli({"run", "--builtin", "quadrotor", "--no-obstacles", "--out", (dir / "open").string(), "--quiet"}) == 0);
  CHECK(cli({"run", (dir / "missing.json").string(), "--out", (dir / "x").string()}) == 4);
  CHECK(cli({"run", "--builtin", "helicopter"}) == 4);
  CHECK(cli({"run"}) == 4);
  CHECK(cli({"run", "--builtin", "quadrotor", "--epsilon", "-1"}) == 4);
  {
    std::ofstream(dir / "blocked.json") << R"({"obstacles": [{"p_c": [0, 0], "r": 8.05}], "position_bound": 8})";
  }
  CHECK(cli({"run", (dir / "blocked.json").string(), "--out", (dir / "blocked").string(), "--quiet"}) == 2);
  {
    std::ofstream(dir / "inside.json") << R"({"obstacles": [{"p_c": [0, 0], "r": 40}]})";
  }
  CHECK(cli({"run", (dir / "inside.json").string(), "--out", (dir / "inside").string()}) == 2);
  CHECK(cli({"run", "--builtin", "quadrotor", "--max-iter", "1", "--out", (dir / "cap").string(), "--quiet"}) == 3);
}

TEST_CASE("subproblem dumps and sweep") {
  const auto dir = scratch("dump");
  REQUIRE(cli({"run", "--builtin", "quadrotor", "--dump-subproblems", "--out", dir.string(), "--quiet"}) == 0);
  std::ifstream in(dir / "subproblems" / "subproblem_001.txt");
  REQUIRE(in);
  const ConicProgram p = read_triplets(in);
  CHECK(p.num_vars() == 222 + 24);

  {
    std::ofstream(dir / "one.json") << R"({"obstacles": []})";
    std::ofstream(dir / "two.json") << R"({"obstacles": [{"p_c": [0, 0], "r": 2}]})";
  }
  CHECK(cli({"run", "--sweep", (dir / "one.json").string(), (dir / "two.json").string(), "--out",
             (dir / "sweep").string(), "--quiet"}) == 0);
  CHECK(std::filesystem::exists(dir / "sweep" / "one" / "report.json"));
  CHECK(std::filesystem::exists(dir / "sweep" / "two" / "report.json"));
  CHECK(cli({"run", (dir / "one.json").string(), (dir / "two.json").string()}) == 4);
}
