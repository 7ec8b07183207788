#include "scvx/quadrotor.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "scvx/error.hpp"

namespace scvx {

namespace {

using json = nlohmann::json;

ScvxError bad_input(const std::string& what) { return ScvxError(ErrorCode::invalid_argument, "scenario: " + what); }

bool finite(const Eigen::Vector3d& v) { return v.allFinite(); }

double ground_margin(const Eigen::Vector3d& p, const Obstacle& o) {
  return (p.head<2>() - o.center).norm() - o.radius;
}

Eigen::Vector3d read_vec3(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3) throw bad_input(std::string(key) + " must be an array of 3 numbers");
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) throw bad_input(std::string(key) + " must hold numbers");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

double read_number(const json& j, const char* key) {
  if (!j.at(key).is_number()) throw bad_input(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

void QuadrotorScenario::validate() const {
  if (N < 2) throw bad_input("N must be at least 2");
  if (!(t_f > 0.0) || !std::isfinite(t_f)) throw bad_input("t_f must be positive");
  if (!(V_max > 0.0) || !(u_max > 0.0)) throw bad_input("V_max and u_max must be positive");
  if (!(theta_cone > 0.0 && theta_cone < 90.0)) throw bad_input("theta_cone must lie in (0, 90) degrees");
  if (!(position_bound > 0.0)) throw bad_input("position_bound must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw bad_input("lambda must be nonnegative");
  if (!(epsilon > 0.0)) throw bad_input("epsilon must be positive");
  if (!finite(g_vec) || !finite(n_hat) || !finite(p0) || !finite(v0) || !finite(pf) || !finite(vf))
    throw bad_input("vectors must be finite");
  if (std::fabs(n_hat.norm() - 1.0) > 1e-9) throw bad_input("n_hat must be a unit vector");
  for (std::size_t k = 0; k < obstacles.size(); ++k)
    if (!(obstacles[k].radius > 0.0) || !obstacles[k].center.allFinite())
      throw ScvxError(ErrorCode::invalid_argument, "scenario: obstacle radius must be positive", static_cast<int>(k));

  // The terminal state is held at rest by -g_vec, which must be admissible.
  const Eigen::Vector3d hold = -g_vec;
  const double cos_theta = std::cos(theta_cone * std::numbers::pi / 180.0);
  if (hold.norm() > u_max || n_hat.dot(hold) < cos_theta * hold.norm())
    throw ScvxError(ErrorCode::infeasible_scenario, "hover control -g_vec violates the actuator limits");
  if (v0.norm() > V_max || vf.norm() > V_max)
    throw ScvxError(ErrorCode::infeasible_scenario, "a pinned velocity exceeds V_max");
  if (p0.cwiseAbs().maxCoeff() > position_bound || pf.cwiseAbs().maxCoeff() > position_bound)
    throw ScvxError(ErrorCode::infeasible_scenario, "a pinned position lies outside the position box");
  for (std::size_t k = 0; k < obstacles.size(); ++k)
    if (ground_margin(p0, obstacles[k]) <= 0.0 || ground_margin(pf, obstacles[k]) <= 0.0)
      throw ScvxError(ErrorCode::infeasible_scenario, "a pinned position lies inside an obstacle",
                      static_cast<int>(k));
}

QuadrotorScenario builtin_quadrotor() { return QuadrotorScenario{}; }

QuadrotorScenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw bad_input(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw bad_input("top level must be an object");
  QuadrotorScenario s = builtin_quadrotor();
  try {
    static const char* known[] = {"N",  "t_f", "V_max", "u_max", "g_vec",     "theta_cone", "n_hat",         "p0",
                                  "v0", "pf",  "vf",    "obstacles", "lambda", "epsilon",    "position_bound"};
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (std::find(std::begin(known), std::end(known), key) == std::end(known)) throw bad_input("unknown field " + key);
    }
    if (j.contains("N")) {
      if (!j["N"].is_number_integer()) throw bad_input("N must be an integer");
      s.N = j["N"].get<int>();
    }
    if (j.contains("t_f")) s.t_f = read_number(j, "t_f");
    if (j.contains("V_max")) s.V_max = read_number(j, "V_max");
    if (j.contains("u_max")) s.u_max = read_number(j, "u_max");
    if (j.contains("theta_cone")) s.theta_cone = read_number(j, "theta_cone");
    if (j.contains("lambda")) s.lambda = read_number(j, "lambda");
    if (j.contains("epsilon")) s.epsilon = read_number(j, "epsilon");
    if (j.contains("position_bound")) s.position_bound = read_number(j, "position_bound");
    if (j.contains("g_vec")) s.g_vec = read_vec3(j, "g_vec");
    if (j.contains("n_hat")) s.n_hat = read_vec3(j, "n_hat");
    if (j.contains("p0")) s.p0 = read_vec3(j, "p0");
    if (j.contains("v0")) s.v0 = read_vec3(j, "v0");
    if (j.contains("pf")) s.pf = read_vec3(j, "pf");
    if (j.contains("vf")) s.vf = read_vec3(j, "vf");
    if (j.contains("obstacles")) {
      if (!j["obstacles"].is_array()) throw bad_input("obstacles must be an array");
      s.obstacles.clear();
      for (const auto& o : j["obstacles"]) {
        if (!o.is_object() || !o.contains("p_c") || !o.contains("r")) throw bad_input("obstacle needs p_c and r");
        const json& c = o["p_c"];
        if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
          throw bad_input("obstacle p_c must be an array of 2 numbers");
        if (!o["r"].is_number()) throw bad_input("obstacle r must be a number");
        s.obstacles.push_back({{c[0].get<double>(), c[1].get<double>()}, o["r"].get<double>()});
      }
    }
  } catch (const json::exception& e) {
    throw bad_input(e.what());
  }
  return s;
}

QuadrotorScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw bad_input("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string scenario_to_json(const QuadrotorScenario& s) {
  json j;
  j["N"] = s.N;
  j["t_f"] = s.t_f;
  j["V_max"] = s.V_max;
  j["u_max"] = s.u_max;
  j["g_vec"] = vec_json(s.g_vec);
  j["theta_cone"] = s.theta_cone;
  j["n_hat"] = vec_json(s.n_hat);
  j["p0"] = vec_json(s.p0);
  j["v0"] = vec_json(s.v0);
  j["pf"] = vec_json(s.pf);
  j["vf"] = vec_json(s.vf);
  json obs = json::array();
  for (const auto& o : s.obstacles) obs.push_back({{"p_c", {o.center.x(), o.center.y()}}, {"r", o.radius}});
  j["obstacles"] = obs;
  j["lambda"] = s.lambda;
  j["epsilon"] = s.epsilon;
  j["position_bound"] = s.position_bound;
  return j.dump(2);
}

namespace {

OptimalControlProblem make_problem(const QuadrotorScenario& s, const Eigen::Matrix<double, 6, 6>& A,
                                   const Eigen::Matrix<double, 6, 3>& B) {
  const int T = s.N;
  const ProblemDims dims = ProblemDims::make(6, 3, T, static_cast<int>(s.obstacles.size()));

  // g_i = (A - I) x_i + B u_i + B g - x_{i+1} + x_i, one affine row per state component.
  DynamicsModel dynamics;
  Eigen::Matrix<double, 6, 9> AB;
  AB << A - Eigen::Matrix<double, 6, 6>::Identity(), B;
  const Eigen::Matrix<double, 6, 1> drift = B * s.g_vec;
  std::vector<int> local(9);
  for (int k = 0; k < 9; ++k) local[static_cast<std::size_t>(k)] = k;
  for (int r = 0; r < 6; ++r) dynamics.components.push_back(ConvexFunction::affine(local, AB.row(r).transpose(), drift[r]));

  StateConstraintModel keep_out;
  Eigen::Matrix<double, 2, 3> H = Eigen::Matrix<double, 2, 3>::Zero();
  H(0, 0) = H(1, 1) = 1.0;
  for (const auto& o : s.obstacles)
    keep_out.components.push_back(ConvexFunction::norm({0, 1, 2}, H, o.center, 1.0, -o.radius));

  BaseSet base;
  Eigen::Matrix<double, 3, 6> velocity = Eigen::Matrix<double, 3, 6>::Zero();
  velocity.rightCols<3>().setIdentity();
  const double cos_theta = std::cos(s.theta_cone * std::numbers::pi / 180.0);
  for (int i = 0; i < T; ++i) {
    base.cones.push_back({Block::state, i, velocity, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(6), s.V_max, "speed"});
    for (int c = 0; c < 3; ++c) base.boxes.push_back({Block::state, i, c, -s.position_bound, s.position_bound});
  }
  for (int i = 0; i + 1 < T; ++i) {
    base.cones.push_back({Block::control, i, Eigen::Matrix3d::Identity(), Eigen::VectorXd::Zero(3),
                          Eigen::VectorXd::Zero(3), s.u_max, "acceleration"});
    base.cones.push_back({Block::control, i, cos_theta * Eigen::Matrix3d::Identity(), Eigen::VectorXd::Zero(3),
                          s.n_hat, 0.0, "thrust-cone"});
  }
  Eigen::VectorXd x0(6), xf(6);
  x0 << s.p0, s.v0;
  xf << s.pf, s.vf;
  base.pins.push_back({Block::state, 0, x0});
  base.pins.push_back({Block::state, T - 1, xf});

  return OptimalControlProblem(dims, std::move(dynamics), std::move(keep_out), std::move(base),
                               Objective::min_fuel(1.0, s.g_vec.norm()));
}

}  // namespace

QuadrotorModel build_quadrotor_problem(const QuadrotorScenario& scenario) {
  scenario.validate();
  const double dt = scenario.dt();
  Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Identity();
  A.topRightCorner<3, 3>() = dt * Eigen::Matrix3d::Identity();
  Eigen::Matrix<double, 6, 3> B;
  B << 0.5 * dt * dt * Eigen::Matrix3d::Identity(), dt * Eigen::Matrix3d::Identity();
  return QuadrotorModel{scenario, make_problem(scenario, A, B), A, B, -scenario.g_vec};
}

Eigen::VectorXd straight_line_guess(const QuadrotorModel& model) {
  const auto& s = model.scenario;
  const ProblemDims& dims = model.problem.dims();
  std::vector<Eigen::VectorXd> states, controls;
  for (int i = 0; i < dims.T; ++i) {
    const double a = static_cast<double>(i) / (dims.T - 1);
    Eigen::VectorXd x(6);
    x << (1.0 - a) * s.p0 + a * s.pf, Eigen::Vector3d::Zero();
    if (i == 0) x.tail<3>() = s.v0;
    if (i == dims.T - 1) x.tail<3>() = s.vf;
    states.push_back(x);
  }
  for (int i = 0; i + 1 < dims.T; ++i) controls.push_back(model.hold_control);
  return stack(dims, states, controls).values();
}

TrajectoryRecord make_record(const QuadrotorModel& model, const Eigen::VectorXd& y) {
  const ProblemDims& dims = model.problem.dims();
  const Trajectory traj = unstack(StackedVariable(dims, y));
  TrajectoryRecord rec;
  const double dt = model.scenario.dt();
  for (int i = 0; i < dims.T; ++i) {
    const auto& x = traj.states[static_cast<std::size_t>(i)];
    rec.times.push_back(i * dt);
    rec.positions.emplace_back(x.head<3>());
    rec.velocities.emplace_back(x.tail<3>());
    rec.controls.emplace_back(i + 1 < dims.T ? Eigen::Vector3d(traj.controls[static_cast<std::size_t>(i)])
                                             : model.hold_control);
    std::vector<double> m;
    for (const auto& o : model.scenario.obstacles) m.push_back(ground_margin(rec.positions.back(), o));
    rec.margins.push_back(std::move(m));
  }
  for (const auto& u : rec.controls) rec.cost += u.norm();
  return rec;
}

BenchmarkSummary summarize(const QuadrotorModel& model, const InitializerReport& init, const SolveReport& report) {
  BenchmarkSummary out;
  const Eigen::VectorXd& y = report.final_iterate();
  const TrajectoryRecord rec = make_record(model, y);
  out.final_cost = rec.cost;
  out.initial_cost = make_record(model, init.point).cost;
  out.min_obstacle_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : rec.margins)
    for (double m : row) {
      out.min_obstacle_margin = std::min(out.min_obstacle_margin, m);
      ++out.obstacle_rows;
    }
  const Eigen::VectorXd g = eval_g(model.problem, y);
  out.max_dynamics_defect = g.size() > 0 ? g.lpNorm<Eigen::Infinity>() : 0.0;
  const ProblemDims& dims = model.problem.dims();
  for (const auto& pin : model.problem.base_set().pins) {
    const int off = block_offset(dims, pin.block, pin.step);
    out.max_pin_error = std::max(out.max_pin_error,
                                 (y.segment(off, pin.value.size()) - pin.value).lpNorm<Eigen::Infinity>());
  }
  out.max_base_violation = model.problem.base_set().max_violation(dims, {y.data(), static_cast<std::size_t>(y.size())});
  return out;
}

BenchmarkRun run_benchmark(const QuadrotorScenario& scenario, const BenchmarkOptions& options) {
  QuadrotorModel model = build_quadrotor_problem(scenario);
  ScvxConfig config;
  config.epsilon = options.epsilon > 0.0 ? options.epsilon : scenario.epsilon;
  config.max_successions = options.max_successions;
  config.threads = options.threads;
  config.solver = options.solver;
  config.penalty = PenaltyConfig::default_for(model.problem, scenario.lambda);
  if (options.dump_dir) {
    const std::filesystem::path dir = *options.dump_dir;
    std::filesystem::create_directories(dir);
    config.on_subproblem = [dir](int index, const ConicProgram& program) {
      std::ostringstream name;
      name << "subproblem_" << std::setw(3) << std::setfill('0') << index << ".txt";
      std::ofstream out(dir / name.str());
      write_triplets(program, out);
    };
  }
  InitializerConfig init_config;
  init_config.solver = options.solver;
  InitializerReport init = find_feasible_start(model.problem, straight_line_guess(model), config.penalty, init_config);
  SolveReport report = scvx(model.problem, init.point, config);
  BenchmarkSummary summary = summarize(model, init, report);
  return BenchmarkRun{std::move(model), std::move(init), std::move(report), summary};
}

std::string report_json(const BenchmarkRun& run) {
  const SolveReport& r = run.report;
  json j;
  j["scenario"] = json::parse(scenario_to_json(run.model.scenario));
  j["status"] = to_string(r.status);
  if (!r.failure_reason.empty()) j["failure_reason"] = r.failure_reason;
  j["failed_solve"] = r.failed_solve;
  j["successions"] = r.successions;
  j["subproblem_solves"] = r.subproblem_solves();
  j["fixed_point_residual"] = r.fixed_point_residual;
  j["relaxation_floor"] = r.relaxation_floor;
  j["penalty_values"] = r.penalty_values;
  j["feasibility_margins"] = r.feasibility_margins;
  j["base_violations"] = r.base_violations;
  json stats = json::array();
  for (const auto& s : r.subsolver_stats)
    stats.push_back({{"status", to_string(s.status)},
                     {"iterations", s.iterations},
                     {"gap", s.gap},
                     {"solver_objective", s.solver_objective},
                     {"penalty_value", s.penalty_value}});
  j["subsolver_stats"] = stats;
  json iterates = json::array();
  for (const auto& z : r.iterates) iterates.push_back(vec_json(z));
  j["iterates"] = iterates;
  j["dyn_multipliers"] = vec_json(r.dyn_multipliers);
  j["penalty_check"] = {{"status", to_string(r.penalty_check.status)},
                        {"required_lambda", r.penalty_check.required_lambda}};
  j["defect_l1"] = r.defect_l1;
  j["penalty_exact"] = r.penalty_exact;
  j["initializer"] = {{"cone_solves", run.init.cone_solves},
                      {"unchanged", run.init.unchanged},
                      {"violation_history", run.init.violation_history},
                      {"axis_fallbacks", run.init.axis_fallbacks},
                      {"warnings", run.init.warnings}};
  const BenchmarkSummary& s = run.summary;
  j["summary"] = {{"final_cost", s.final_cost},
                  {"initial_cost", s.initial_cost},
                  {"min_obstacle_margin", s.min_obstacle_margin},
                  {"max_dynamics_defect", s.max_dynamics_defect},
                  {"max_pin_error", s.max_pin_error},
                  {"max_base_violation", s.max_base_violation},
                  {"obstacle_rows", s.obstacle_rows}};
  return j.dump(2) + "\n";
}

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw ScvxError(ErrorCode::invalid_argument, "cannot write " + path.string());
    out_ << std::setprecision(17);
  }
  std::ofstream& stream() { return out_; }

 private:
  std::ofstream out_;
};

void write_path_rows(std::ostream& out, const QuadrotorModel& model, const std::vector<Eigen::VectorXd>& iterates,
                     bool with_altitude) {
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    const TrajectoryRecord rec = make_record(model, iterates[k]);
    for (std::size_t i = 0; i < rec.positions.size(); ++i) {
      const auto& p = rec.positions[i];
      out << k << ',' << i << ',' << p.x() << ',' << p.y();
      if (with_altitude) out << ',' << p.z();
      out << '\n';
    }
  }
}

}  // namespace

void write_outputs(const BenchmarkRun& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw ScvxError(ErrorCode::invalid_argument, "cannot write " + (dir / "report.json").string());
    out << report_json(run);
  }
  const TrajectoryRecord rec = make_record(run.model, run.report.final_iterate());
  {
    CsvWriter csv(dir / "trajectory.csv");
    auto& out = csv.stream();
    out << "t,px,py,pz,vx,vy,vz,ux,uy,uz";
    for (std::size_t j = 0; j < run.model.scenario.obstacles.size(); ++j) out << ",margin_" << j + 1;
    out << '\n';
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      out << rec.times[i];
      for (const auto* v : {&rec.positions[i], &rec.velocities[i], &rec.controls[i]})
        for (int c = 0; c < 3; ++c) out << ',' << (*v)[c];
      for (double m : rec.margins[i]) out << ',' << m;
      out << '\n';
    }
  }
  {
    CsvWriter csv(dir / "ground_track.csv");
    csv.stream() << "iterate,step,px,py\n";
    write_path_rows(csv.stream(), run.model, run.report.iterates, false);
  }
  {
    CsvWriter csv(dir / "path3d.csv");
    csv.stream() << "iterate,step,px,py,pz\n";
    write_path_rows(csv.stream(), run.model, run.report.iterates, true);
  }
  {
    CsvWriter csv(dir / "cost_curve.csv");
    auto& out = csv.stream();
    out << "iterate,cost,penalty,feasibility_margin\n";
    for (std::size_t k = 0; k < run.report.iterates.size(); ++k)
      out << k << ',' << make_record(run.model, run.report.iterates[k]).cost << ',' << run.report.penalty_values[k]
          << ',' << run.report.feasibility_margins[k] << '\n';
  }
}

void print_iteration_table(const BenchmarkRun& run, std::ostream& out) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  const SolveReport& r = run.report;
  out << "feasibility solves: " << run.init.cone_solves << (run.init.unchanged ? " (guess already feasible)" : "")
      << '\n';
  out << std::setw(4) << "k" << std::setw(16) << "cost" << std::setw(14) << "decrease" << std::setw(14) << "margin"
      << std::setw(8) << "ipm" << '\n';
  out << std::fixed;
  for (std::size_t k = 0; k < r.iterates.size(); ++k) {
    out << std::setw(4) << k << std::setw(16) << std::setprecision(6) << r.penalty_values[k];
    if (k == 0)
      out << std::setw(14) << "-";
    else
      out << std::setw(14) << std::setprecision(3) << std::scientific << r.penalty_values[k - 1] - r.penalty_values[k]
          << std::fixed;
    out << std::setw(14) << std::setprecision(3) << std::scientific << r.feasibility_margins[k] << std::fixed;
    if (k < r.subsolver_stats.size())
      out << std::setw(8) << r.subsolver_stats[k].iterations;
    out << '\n';
  }
  out << "status " << to_string(r.status) << ", successions " << r.successions << ", subproblem solves "
      << r.subproblem_solves() << ", final cost " << std::setprecision(6) << run.summary.final_cost << '\n';
  out.flags(flags);
  out.precision(precision);
}

}  // namespace scvx
