#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "chopt/experiment.hpp"
#include "chopt/io.hpp"
#include "support.hpp"

using namespace testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("chopt-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSmallConfig = R"({
  "pipeline": "simulate",
  "model": {
    "alpha": 0.1, "beta": 0.1,
    "potential": {"kind": "quartic"},
    "proliferation": {"kind": "smooth_ramp", "p0": 1.0, "width": 0.5}
  },
  "grid": {"dim": 1, "n": [16], "extents": [1.0]},
  "time": {"T": 0.5, "nt": 10},
  "initial_data": {"preset": "tanh_front", "width": 0.1, "position": 0.3, "amplitude": 0.9},
  "cost": {"b": [1e-3, 1.0, 0.0, 1.0, 0.0, 0.01, 1.0], "tau_star": 0.25, "targets": {"equilibrium": -0.5}},
  "bounds": {"lower": 0.0, "upper": 2.0}
})";

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("config was accepted");
  return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("snapshot round trip") {
  const fs::path dir = scratch_dir("snapshot");
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (const Grid& g : {Grid::line(17, 1.0), Grid::rectangle(5, 7, 1.0, 2.0)}) {
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = nd(rng);
    write_snapshot(dir / "f.bin", f);
    CHECK(fs::file_size(dir / "f.bin") == 32 + 8 * f.size());
    CHECK(read_snapshot(dir / "f.bin", g) == f);
  }
  // Header layout.
  std::ifstream in(dir / "f.bin", std::ios::binary);
  char magic[6];
  in.read(magic, 6);
  CHECK(std::string(magic, 6) == "CHFLD1");
  // Mismatched grid and missing file.
  CHECK_THROWS_AS(read_snapshot(dir / "f.bin", Grid::line(35, 1.0)), Error);
  try {
    read_snapshot(dir / "missing.bin", Grid::line(4, 1.0));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("trajectory and control round trip") {
  const fs::path dir = scratch_dir("traj");
  const Setup b = baseline(16, 8);
  const ControlField u = wavy_control(b.params);
  const StateTrajectory s = solve_state(b.params, b.init, u);
  write_trajectory(dir / "state.json", s.traj, {"mu", "phi", "sigma"});
  std::vector<std::string> names;
  const Trajectory back = read_trajectory(dir / "state.json", &names);
  CHECK(names == std::vector<std::string>{"mu", "phi", "sigma"});
  CHECK(back.time == s.traj.time);
  CHECK(back.frames == s.traj.frames);
  const auto phis = read_component(dir / "state.json", "phi", b.params.grid, b.params.time);
  CHECK(phis[3] == s.phi(3));
  write_control(dir / "control.json", u);
  CHECK(read_control(dir / "control.json") == u);
}

TEST_CASE("number formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("config round trip") {
  const ExperimentConfig c = parse_config(kSmallConfig);
  CHECK(c.alpha == 0.1);
  CHECK(c.grid == Grid::line(16, 1.0));
  CHECK(parse_config(config_to_json(c)) == c);
  for (const char* name : {"baseline.json", "verify-suite.json", "relaxed.json", "log-separation.json"}) {
    const ExperimentConfig shipped = load_config(fs::path(CHOPT_CONFIG_DIR) / name);
    CHECK(parse_config(config_to_json(shipped), shipped.base_dir) == shipped);
  }
}

TEST_CASE("config rejections carry the key") {
  std::string msg = config_error(replace(kSmallConfig, "\"beta\": 0.1", "\"beta\": 0.0"));
  CHECK(msg.find("/model/beta") != std::string::npos);
  CHECK(msg.find("positive") != std::string::npos);
  msg = config_error(replace(kSmallConfig, "\"upper\": 2.0", "\"upper\": -1.0"));
  CHECK(msg.find("/bounds") != std::string::npos);
  msg = config_error(replace(kSmallConfig, "\"alpha\": 0.1,", "\"alpha\": 0.1, \"gamma\": 1,"));
  CHECK(msg.find("/model/gamma") != std::string::npos);
  msg = config_error(replace(kSmallConfig, "\"width\": 0.5}", "\"p0\": 1.0}"));
  config_error(replace(kSmallConfig, "\"b\": [1e-3, 1.0, 0.0, 1.0, 0.0, 0.01, 1.0]", "\"b\": [0, 0, 0, 0, 0, 0, 0]"));
  config_error(replace(kSmallConfig, "\"tau_star\": 0.25", "\"tau_star\": 0.75"));
  // Physics parameters have no defaults.
  msg = config_error(replace(kSmallConfig, "\"alpha\": 0.1, ", ""));
  CHECK(msg.find("/model/alpha") != std::string::npos);
  msg = config_error(replace(kSmallConfig, "{\"kind\": \"quartic\"}", "{\"kind\": \"logarithmic\"}"));
  CHECK(msg.find("lambda") != std::string::npos);
  // Syntax errors report the position.
  msg = config_error("{\n  \"pipeline\": ,\n}");
  CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("presets") {
  const Grid g = Grid::line(16, 1.0);
  const Potential q = Potential::quartic();
  InitialSpec s;
  s.kind = InitialSpec::Kind::Equilibrium;
  s.c = 0.0;
  InitialData d = preset_initial_data(s, g, q);
  CHECK(d.mu0.max_abs() == 0.0);
  CHECK(d.phi0.max_abs() == 0.0);
  CHECK(d.sigma0.max_abs() == 0.0);
  s.c = 0.5;
  d = preset_initial_data(s, g, q);
  CHECK(d.mu0 == Field(g, -0.375));
  CHECK(d.sigma0 == Field(g, -0.375));
  CHECK(d.phi0 == Field(g, 0.5));
  s.c = 1.5;
  CHECK_THROWS_AS(preset_initial_data(s, g, Potential::logarithmic(2.0)), Error);

  InitialSpec r;
  r.kind = InitialSpec::Kind::RandomInterior;
  r.amplitude = 0.1;
  r.seed = 12;
  d = preset_initial_data(r, Grid::line(200, 1.0), Potential::logarithmic(2.0));
  CHECK(d.phi0.min() >= -0.1);
  CHECK(d.phi0.max() <= 0.1);
  const InitialData again = preset_initial_data(r, Grid::line(200, 1.0), Potential::logarithmic(2.0));
  CHECK(d.phi0 == again.phi0);
  CHECK(d.mu0 == again.mu0);
}

TEST_CASE("build problem defaults") {
  const Problem p = build_problem(parse_config(kSmallConfig));
  CHECK(p.tau0 == 0.25);
  CHECK(p.u0 == ControlField::constant(p.params.grid, p.params.time, 1.0));
  CHECK(p.cost.phi_Q.size() == 11);
  CHECK(p.cost.sigma_Q[4] == Field(p.params.grid, potential_eval(Potential::quartic(), -0.5, 1)));
}

TEST_CASE("snapshot-backed fields in a config") {
  const fs::path dir = scratch_dir("config-snapshots");
  const Grid g = Grid::line(16, 1.0);
  Field lower(g, 0.0);
  lower[3] = 0.25;
  write_snapshot(dir / "lower.bin", lower);
  std::string text = replace(kSmallConfig, "\"lower\": 0.0", "\"lower\": {\"snapshot\": \"lower.bin\"}");
  const ExperimentConfig c = parse_config(text, dir);
  CHECK(build_problem(c).bounds.lower == lower);
  // A snapshot bound exceeding the upper bound is rejected.
  lower[5] = 3.0;
  write_snapshot(dir / "lower.bin", lower);
  CHECK_THROWS_AS(build_problem(parse_config(text, dir)), Error);
}

TEST_CASE("simulate pipeline writes its artifacts deterministically") {
  const fs::path dir = scratch_dir("run");
  ExperimentConfig c = parse_config(kSmallConfig);
  c.output_dir = (dir / "a").string();
  RunOutcome r = run_experiment(c);
  CHECK(r.code == ExitCode::Ok);
  CHECK(fs::exists(dir / "a" / "simulate" / "state.json"));
  CHECK(fs::exists(dir / "a" / "simulate" / "diagnostics.csv"));
  CHECK(fs::exists(dir / "a" / "run-summary.json"));
  const std::string csv = read_text(dir / "a" / "simulate" / "diagnostics.csv");
  CHECK(csv.rfind("step,newton_iters,mass_residual,delta_sep", 0) == 0);
  c.output_dir = (dir / "b").string();
  r = run_experiment(c);
  CHECK(r.code == ExitCode::Ok);
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a" / "simulate")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir / "a");
    CHECK_MESSAGE(read_text(entry.path()) == read_text(dir / "b" / rel), rel.string());
    ++compared;
  }
  CHECK(compared == 2 + 3 * 11);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::Config) == ExitCode::Config);
  CHECK(exit_code_for(ErrorKind::InvalidArgument) == ExitCode::Config);
  CHECK(exit_code_for(ErrorKind::NewtonDivergence) == ExitCode::Solver);
  CHECK(exit_code_for(ErrorKind::SeparationViolation) == ExitCode::Solver);
  CHECK(exit_code_for(ErrorKind::Io) == ExitCode::Io);
}
