#include <doctest.h>

#include <cmath>

#include "chopt/adjoint.hpp"
#include "chopt/verification.hpp"
#include "support.hpp"

using namespace testing;

namespace {

struct Fixture {
  Setup b = full_weights(32, 64);
  StateTrajectory state;
  Fixture() { state = solve_state(b.params, b.init, wavy_control(b.params)); }
};

double max_rel_diff(const Trajectory& a, const Trajectory& b, double factor) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < a.frames.size(); ++k)
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < a.frames[k][c].size(); ++i) {
        diff = std::max(diff, std::abs(a.frames[k][c][i] - factor * b.frames[k][c][i]));
        scale = std::max(scale, std::abs(a.frames[k][c][i]));
      }
  return diff / scale;
}

}  // namespace

TEST_CASE("terminal data") {
  Fixture f;
  const double tau = f.b.params.time.t(40);
  const AdjointTerminalData d = AdjointTerminalData::build(f.b.params, f.state, tau, f.b.cost);
  const double b2 = f.b.cost.b[2], b4 = f.b.cost.b[4], beta = f.b.params.beta;
  for (std::size_t i = 0; i < d.q.size(); ++i) {
    CHECK(d.q[i] == doctest::Approx((b2 * (f.state.phi(40)[i] - f.b.cost.phi_Omega[i]) + 0.5 * b4) / beta));
    CHECK(d.p[i] == 0.0);
    CHECK(d.r[i] == 0.0);
  }
  const AdjointSolution s = solve_adjoint(f.b.params, f.state, 40, f.b.cost);
  CHECK(s.last_node == 40);
  CHECK(s.traj.frame_count() == 41);
  CHECK(s.traj.frames[40][kQ] == d.q);
  CHECK(s.traj.frames[40][kP] == d.p);
  CHECK(s.traj.frames[40][kR] == d.r);
  for (const Triple& fr : s.traj.frames)
    for (const Field& c : fr) CHECK(c.all_finite());
}

TEST_CASE("zero tracking weights give an exactly zero adjoint") {
  Fixture f;
  CostSpec cost = f.b.cost;
  cost.b = {0.5, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0};
  for (double tau : {f.b.params.time.T, 0.37}) {
    const AdjointSolution s = solve_adjoint(f.b.params, f.state, tau, cost);
    for (const Triple& fr : s.traj.frames)
      for (const Field& c : fr)
        for (std::size_t i = 0; i < c.size(); ++i) { CHECK_FALSE(std::signbit(c[i])); CHECK(c[i] == 0.0); }
  }
}

TEST_CASE("zero horizon returns the terminal data only") {
  Fixture f;
  const AdjointSolution s = solve_adjoint(f.b.params, f.state, 0, f.b.cost);
  CHECK(s.last_node == 0);
  REQUIRE(s.traj.frame_count() == 1);
  const AdjointTerminalData d = AdjointTerminalData::build(f.b.params, f.state, 0.0, f.b.cost);
  CHECK(s.traj.frames[0][kQ] == d.q);
  CHECK(s.traj.frames[0][kR].max_abs() == 0.0);
}

TEST_CASE("invalid horizon index") {
  Fixture f;
  CHECK_THROWS_AS(solve_adjoint(f.b.params, f.state, -1, f.b.cost), Error);
  CHECK_THROWS_AS(solve_adjoint(f.b.params, f.state, f.b.params.time.nt + 1, f.b.cost), Error);
}

TEST_CASE("off-grid horizon reports the snap offset") {
  Fixture f;
  const double dt = f.b.params.time.dt();
  const AdjointSolution s = solve_adjoint(f.b.params, f.state, 10.3 * dt, f.b.cost);
  CHECK(s.last_node == 11);
  CHECK(s.snap_offset == doctest::Approx(0.3 * dt));
  CHECK(std::abs(s.snap_offset) <= 0.5 * dt);
  for (double r : s.step_residuals) CHECK(r <= 1e-9);
}

TEST_CASE("adjoint is linear in the tracking weights") {
  Fixture f;
  CostSpec doubled = f.b.cost;
  for (int i = 1; i <= 4; ++i) doubled.b[i] *= 2.0;
  for (double tau : {0.5, 0.4321}) {
    const AdjointSolution a = solve_adjoint(f.b.params, f.state, tau, f.b.cost);
    const AdjointSolution b = solve_adjoint(f.b.params, f.state, tau, doubled);
    CHECK(max_rel_diff(b.traj, a.traj, 2.0) <= 1e-12);
  }
}

TEST_CASE("discrete duality identity") {
  Fixture f;
  // Full weights, single weights and off-grid horizons.
  std::vector<std::array<double, 7>> weights = {
      f.b.cost.b,
      {0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      {0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0},
      {0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0},
      {0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0},
  };
  int seed = 1;
  for (const auto& b : weights) {
    CostSpec cost = f.b.cost;
    cost.b = b;
    for (double tau : {1.0, 0.5, 0.37}) {
      const DualityReport r = duality_check(f.b.params, f.state, tau, cost, 2, seed++, 1e-9);
      CHECK_MESSAGE(r.passed, r.to_text());
      CHECK(r.max_mismatch <= 1e-9);
    }
  }
}

TEST_CASE("duality with zero tracking weights") {
  Fixture f;
  CostSpec cost = f.b.cost;
  cost.b = {1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  const DualityReport r = duality_check(f.b.params, f.state, 0.6, cost, 3, 4, 1e-9);
  for (std::size_t i = 0; i < r.lhs.size(); ++i) {
    CHECK(std::abs(r.lhs[i]) <= 1e-14);
    CHECK(std::abs(r.rhs[i]) <= 1e-14);
  }
  CHECK(r.passed);
}

TEST_CASE("duality with the relaxed source") {
  Fixture f;
  CostSpec cost = f.b.cost;
  cost.relaxation = Relaxation{0.5, 0.1, Field(f.b.params.grid, 0.375)};
  for (double tau : {0.05, 0.1, 0.5, 0.733}) {
    const DualityReport r = duality_check(f.b.params, f.state, tau, cost, 3, 11, 1e-9);
    CHECK_MESSAGE(r.passed, r.to_text());
  }
}
