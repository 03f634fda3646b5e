#include <doctest.h>

#include <cmath>
#include <random>

#include "chopt/adjoint.hpp"
#include "chopt/verification.hpp"
#include "support.hpp"

using namespace testing;

namespace {

ControlField random_control(const ModelParams& p, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(lo, hi);
  ControlField u = ControlField::constant(p.grid, p.time, 0.0);
  for (Field& f : u.nodes)
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = ud(rng);
  return u;
}

}  // namespace

TEST_CASE("projection onto the admissible box") {
  const ModelParams p = quartic_model(16, 10);
  const ControlBounds bounds = ControlBounds::constant(p.grid, 0.0, 2.0);
  std::mt19937_64 rng(1);
  const ControlField inside = random_control(p, 0.0, 2.0, rng);
  CHECK(project_control(inside, bounds) == inside);
  const ControlField above = ControlField::constant(p.grid, p.time, 3.0);
  CHECK(project_control(above, bounds) == ControlField::constant(p.grid, p.time, 2.0));
  for (int i = 0; i < 20; ++i) {
    const ControlField a = random_control(p, -3.0, 5.0, rng);
    const ControlField b = random_control(p, -3.0, 5.0, rng);
    const ControlField pa = project_control(a, bounds);
    CHECK(bounds.contains(pa));
    CHECK(project_control(pa, bounds) == pa);
    CHECK(control_norm(pa - project_control(b, bounds)) <= control_norm(a - b));
  }
}

TEST_CASE("optimizer configuration validation") {
  OptimizerConfig c;
  CHECK_NOTHROW(c.validate());
  c.armijo.c1 = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.armijo.c1 = 1e-4;
  c.armijo.backtrack = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("pure control energy converges to the projection of zero") {
  Setup b = baseline(32, 32);
  b.cost.b = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  b.bounds = ControlBounds::constant(b.params.grid, -1.0, 1.0);
  const OptResult r = optimize(b.params, b.init, b.cost, b.bounds, OptimizerConfig{}, wavy_control(b.params), 0.5);
  CHECK(r.status == OptStatus::Converged);
  CHECK(control_norm(r.u_opt) <= 1e-8);
  // With the box [0.5, 1] the minimiser is the lower bound.
  b.bounds = ControlBounds::constant(b.params.grid, 0.5, 1.0);
  const OptResult lo = optimize(b.params, b.init, b.cost, b.bounds, OptimizerConfig{}, wavy_control(b.params), 0.5);
  CHECK(control_norm(lo.u_opt - ControlField::constant(b.params.grid, b.params.time, 0.5)) <= 1e-8);
}

TEST_CASE("linear time cost drives tau to zero") {
  Setup b = baseline(32, 32);
  b.cost.b = {0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  const OptResult r = optimize(b.params, b.init, b.cost, b.bounds, OptimizerConfig{}, b.u, 0.6);
  CHECK(r.status == OptStatus::Converged);
  CHECK(r.tau_opt == 0.0);
  CHECK(r.time_case == TimeCase::BoundaryLow);
  const TimeOptimalityReport rep = classify_time_optimality(r.state, r.u_opt, r.tau_opt, b.cost, 1e-8);
  CHECK(rep.time_case == TimeCase::BoundaryLow);
  CHECK(rep.d_tau == 1.0);
  CHECK(rep.satisfied);
}

TEST_CASE("quadratic time cost finds tau star") {
  Setup b = baseline(32, 32);
  b.cost.b = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  b.cost.tau_star = 0.3;
  const OptResult r = optimize(b.params, b.init, b.cost, b.bounds, OptimizerConfig{}, b.u, 0.9);
  CHECK(r.status == OptStatus::Converged);
  CHECK(std::abs(r.tau_opt - 0.3) <= b.params.time.dt());
  const TimeOptimalityReport rep = classify_time_optimality(r.state, r.u_opt, r.tau_opt, b.cost, 1e-6);
  CHECK(rep.time_case == TimeCase::Interior);
  CHECK(rep.satisfied);
  CHECK(rep.lambda == 0.0);
  CHECK(rep.fixed_point_residual >= 0.0);
  CHECK(rep.fixed_point_residual <= b.params.time.dt());
}

TEST_CASE("time optimality classification") {
  const Setup b = baseline(32, 32);
  const StateTrajectory s = solve_state(b.params, b.init, b.u);
  CostSpec lin = b.cost;
  lin.b = {0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  TimeOptimalityReport r = classify_time_optimality(s, b.u, 0.0, lin, 1e-8);
  CHECK(r.time_case == TimeCase::BoundaryLow);
  CHECK(r.d_tau == 1.0);
  CHECK(r.satisfied);
  CHECK(r.fixed_point_residual < 0.0);
  // Within dt/2 of the endpoint counts as the endpoint.
  r = classify_time_optimality(s, b.u, 0.4 * b.params.time.dt(), lin, 1e-8);
  CHECK(r.time_case == TimeCase::BoundaryLow);
  // Increasing cost at T violates the upper-endpoint condition.
  r = classify_time_optimality(s, b.u, 1.0, lin, 1e-8);
  CHECK(r.time_case == TimeCase::BoundaryHigh);
  CHECK_FALSE(r.satisfied);
  // Interior point of a linear cost is not stationary.
  r = classify_time_optimality(s, b.u, 0.5, lin, 1e-8);
  CHECK(r.time_case == TimeCase::Interior);
  CHECK_FALSE(r.satisfied);

  CostSpec quad = b.cost;
  quad.b = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  quad.tau_star = 0.5;
  r = classify_time_optimality(s, b.u, 0.5, quad, 1e-12);
  CHECK(r.time_case == TimeCase::Interior);
  CHECK(r.satisfied);
  CHECK(r.lambda == 0.0);
  CHECK(r.fixed_point_residual == doctest::Approx(0.0));
}

TEST_CASE("tracking problem: descent, feasibility and first-order conditions") {
  const Setup b = baseline(32, 64);
  OptimizerConfig cfg;
  const OptResult r = optimize(b.params, b.init, b.cost, b.bounds, cfg, b.u, 0.5);
  MESSAGE("status " << std::string(to_string(r.status)) << " iterations " << r.history.size() << " tau " << r.tau_opt);
  CHECK(r.status == OptStatus::Converged);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    CHECK(r.history[i].cost.total <= r.history[i - 1].cost.total);
    CHECK(r.history[i].tau >= 0.0);
    CHECK(r.history[i].tau <= 1.0);
  }
  CHECK(b.bounds.contains(r.u_opt));
  CHECK(r.max_mass_residual <= 1e-10);

  // Variational inequality on random feasible v.
  const AdjointSolution adj = solve_adjoint(b.params, r.state, r.tau_opt, b.cost);
  const ControlField g = control_gradient(adj.traj, r.u_opt, b.cost.b[0]);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const ControlField v = random_control(b.params, 0.0, 2.0, rng);
    const ControlField d = v - r.u_opt;
    CHECK(control_inner(g, d) >= -1e-6 * control_norm(d));
  }
  // Projection characterisation.
  ControlField target = -1.0 / b.cost.b[0] * (g - b.cost.b[0] * r.u_opt);
  target = project_control(target, b.bounds);
  CHECK(control_norm(r.u_opt - target) <= 1e-4 * (1.0 + control_norm(r.u_opt)));
  const TimeOptimalityReport t = classify_time_optimality(r.state, r.u_opt, r.tau_opt, b.cost, cfg.grad_tol);
  CHECK(t.satisfied);
}

TEST_CASE("history records every iteration") {
  const Setup b = baseline(16, 16);
  OptimizerConfig cfg;
  cfg.max_outer_iters = 3;
  cfg.grad_tol = 1e-14;
  const OptResult r = optimize(b.params, b.init, b.cost, b.bounds, cfg, b.u, 0.5);
  CHECK(r.status == OptStatus::MaxIterations);
  CHECK_FALSE(r.history.empty());
  CHECK(r.state_solves >= 3);
  CHECK(std::string(to_string(r.status)) == "max_iterations");
}
