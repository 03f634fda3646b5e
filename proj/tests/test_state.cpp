#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace testing;

namespace {

InitialData equilibrium(const ModelParams& p, double c) {
  InitialSpec s;
  s.kind = InitialSpec::Kind::Equilibrium;
  s.c = c;
  return preset_initial_data(s, p.grid, p.potential);
}

double sup_distance(const Field& a, double c) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - c));
  return m;
}

}  // namespace

TEST_CASE("model parameter validation") {
  ModelParams p = quartic_model(16, 8);
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.beta = 0.1;
  p.alpha = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("homogeneous equilibrium is stationary") {
  for (double c : {-0.5, 0.0, 0.3}) {
    ModelParams p = quartic_model(32, 20);
    const InitialData init = equilibrium(p, c);
    const StateTrajectory s = solve_state(p, init, ControlField::constant(p.grid, p.time, 0.0));
    REQUIRE(s.traj.frame_count() == 21);
    for (int k = 0; k <= 20; ++k) CHECK(sup_distance(s.phi(k), c) <= 1e-10);
  }
  ModelParams p = quartic_model(8, 10);
  p.grid = Grid::rectangle(8, 6, 1.0, 0.5);
  p.potential = Potential::logarithmic(2.0);
  const InitialData init = equilibrium(p, 0.2);
  const StateTrajectory s = solve_state(p, init, ControlField::constant(p.grid, p.time, 0.0));
  for (int k = 0; k <= 10; ++k) CHECK(sup_distance(s.phi(k), 0.2) <= 1e-10);
}

TEST_CASE("frame zero is the initial data and frames are finite") {
  const Setup b = baseline(64, 64);
  const StateTrajectory s = solve_state(b.params, b.init, wavy_control(b.params));
  CHECK(s.mu(0) == b.init.mu0);
  CHECK(s.phi(0) == b.init.phi0);
  CHECK(s.sigma(0) == b.init.sigma0);
  CHECK(s.steps.size() == 64);
  for (const Triple& f : s.traj.frames)
    for (const Field& c : f) CHECK(c.all_finite());
}

TEST_CASE("discrete mass identity") {
  const Setup b = baseline(64, 64);
  const ControlField u = wavy_control(b.params);
  const StateTrajectory s = solve_state(b.params, b.init, u);
  const double m0 = conserved_mass(s.traj.frames[0], b.params.alpha);
  double supplied = 0.0;
  for (int k = 1; k <= 64; ++k) {
    supplied += b.params.time.dt() * integrate(u.nodes[k - 1]);
    const double mk = conserved_mass(s.traj.frames[k], b.params.alpha);
    CHECK(std::abs(mk - m0 - supplied) <= 1e-10 * (1.0 + std::abs(m0)));
  }
  CHECK(s.max_mass_residual() <= 1e-10);

  // Same in 2D.
  ModelParams p = quartic_model(8, 16);
  p.grid = Grid::rectangle(10, 7, 1.0, 0.8);
  InitialSpec preset;
  preset.kind = InitialSpec::Kind::RandomInterior;
  preset.amplitude = 0.5;
  preset.seed = 3;
  const InitialData init = preset_initial_data(preset, p.grid, p.potential);
  const StateTrajectory s2 = solve_state(p, init, ControlField::constant(p.grid, p.time, 0.3));
  CHECK(s2.max_mass_residual() <= 1e-10);
}

TEST_CASE("without proliferation the nutrient is a heat flow") {
  ModelParams p = quartic_model(48, 40);
  p.proliferation = Proliferation::constant(0.0);
  InitialData init = tanh_front(p);
  for (std::size_t i = 0; i < init.sigma0.size(); ++i) init.sigma0[i] = std::cos(3.0 * p.grid.center(0, i)) + 0.2;
  const StateTrajectory s = solve_state(p, init, ControlField::constant(p.grid, p.time, 0.0));
  const double total0 = integrate(s.sigma(0));
  double prev = norm_l2(s.sigma(0));
  for (int k = 1; k <= 40; ++k) {
    CHECK(std::abs(integrate(s.sigma(k)) - total0) <= 1e-12);
    const double now = norm_l2(s.sigma(k));
    CHECK(now <= prev + 1e-15);
    prev = now;
  }
}

TEST_CASE("first order in time") {
  // Perturbed equilibrium on a short horizon, where the final state is still
  // transient; compare final states at dt, dt/2, dt/4.
  auto final_phi = [](int nt) {
    ModelParams p = quartic_model(64, nt);
    p.time.T = 0.05;
    InitialSpec preset;
    preset.kind = InitialSpec::Kind::Equilibrium;
    preset.c = -0.3;
    InitialData init = preset_initial_data(preset, p.grid, p.potential);
    for (std::size_t i = 0; i < init.phi0.size(); ++i)
      init.phi0[i] += 0.2 * std::cos(M_PI * p.grid.center(0, static_cast<int>(i)));
    return solve_state(p, init, wavy_control(p)).phi(nt);
  };
  const Field a = final_phi(40), b = final_phi(80), c = final_phi(160);
  const double ratio = norm_l2(a - b) / norm_l2(b - c);
  MESSAGE("self-convergence ratio " << ratio);
  CHECK(ratio >= 1.7);
  CHECK(ratio <= 2.3);
}

TEST_CASE("separation report") {
  Trajectory t;
  t.time = TimeGrid{1.0, 2};
  const Grid g = Grid::line(4, 1.0);
  t.frames.assign(3, {Field(g), Field(g, 0.0), Field(g)});
  const Potential l = Potential::logarithmic(2.0);
  CHECK(separation_report(t, l).delta_sep == doctest::Approx(1.0));
  t.frames[1][kPhi] = Field(g, 0.9);
  const SeparationReport r = separation_report(t, l);
  CHECK(r.delta_sep == doctest::Approx(0.1));
  CHECK(r.argmin_frame == 1);
}

TEST_CASE("logarithmic run stays separated") {
  ModelParams p = quartic_model(64, 50, 8.0, 2.0);
  p.potential = Potential::logarithmic(2.0);
  InitialSpec preset;
  preset.kind = InitialSpec::Kind::RandomInterior;
  preset.amplitude = 0.3;
  preset.seed = 7;
  const InitialData init = preset_initial_data(preset, p.grid, p.potential);
  const StateTrajectory s = solve_state(p, init, ControlField::constant(p.grid, p.time, 0.05));
  CHECK(separation_report(s.traj, p.potential).delta_sep > 0.0);
  for (const auto& d : s.steps) CHECK(d.delta_sep > 0.0);
  CHECK(s.max_mass_residual() <= 1e-10);
}

TEST_CASE("initial data outside the logarithmic domain is rejected") {
  ModelParams p = quartic_model(8, 4);
  p.potential = Potential::logarithmic(2.0);
  InitialData init = equilibrium(quartic_model(8, 4), 0.0);
  init.phi0[3] = 1.0;
  CHECK_THROWS_AS(solve_state(p, init, ControlField::constant(p.grid, p.time, 0.0)), Error);
}

TEST_CASE("solve is deterministic") {
  const Setup b = baseline(32, 32);
  const ControlField u = wavy_control(b.params);
  const StateTrajectory a = solve_state(b.params, b.init, u);
  const StateTrajectory c = solve_state(b.params, b.init, u);
  CHECK(a.traj.frames == c.traj.frames);
}
