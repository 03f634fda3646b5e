#pragma once

#include <cmath>

#include "chopt/config.hpp"
#include "chopt/control.hpp"
#include "chopt/objective.hpp"
#include "chopt/state.hpp"

namespace testing {

using namespace chopt;

struct Setup {
  ModelParams params;
  InitialData init;
  CostSpec cost;
  ControlBounds bounds;
  ControlField u;
};

inline ModelParams quartic_model(int n, int nt, double length = 1.0, double T = 1.0) {
  ModelParams p;
  p.alpha = 0.1;
  p.beta = 0.1;
  p.potential = Potential::quartic();
  p.proliferation = Proliferation::smooth_ramp(1.0);
  p.grid = Grid::line(n, length);
  p.time = TimeGrid{T, nt};
  return p;
}

inline InitialData tanh_front(const ModelParams& p, double width = 0.1, double position = 0.3,
                              double amplitude = 0.9) {
  InitialSpec s;
  s.kind = InitialSpec::Kind::TanhFront;
  s.width = width;
  s.position = position;
  s.amplitude = amplitude;
  return preset_initial_data(s, p.grid, p.potential);
}

inline CostSpec equilibrium_cost(const ModelParams& p, std::array<double, 7> b, double c, double tau_star) {
  const Field phi(p.grid, c);
  const Field sigma(p.grid, potential_eval(p.potential, c, 1));
  return CostSpec::with_constant_targets(b, phi, sigma, phi, p.time, tau_star);
}

/// The tracking problem used throughout: quartic potential, alpha = beta = 0.1,
/// smooth ramp P0 = 1, b = (1e-3, 1, 0, 1, 0, 0.01, 1), tau* = T / 2,
/// bounds [0, 2], equilibrium(-0.5) targets, tanh front initial data.
inline Setup baseline(int n = 128, int nt = 256) {
  Setup s;
  s.params = quartic_model(n, nt);
  s.init = tanh_front(s.params);
  s.cost = equilibrium_cost(s.params, {1e-3, 1.0, 0.0, 1.0, 0.0, 0.01, 1.0}, -0.5, 0.5);
  s.bounds = ControlBounds::constant(s.params.grid, 0.0, 2.0);
  s.u = s.bounds.midpoint(s.params.time);
  return s;
}

/// Baseline with every cost weight switched on.
inline Setup full_weights(int n = 32, int nt = 64) {
  Setup s = baseline(n, nt);
  s.cost.b = {1e-3, 1.0, 0.7, 1.0, 0.4, 0.01, 1.0};
  return s;
}

/// A spatially and temporally varying control inside [0, 2].
inline ControlField wavy_control(const ModelParams& p) {
  ControlField u = ControlField::constant(p.grid, p.time, 0.0);
  for (int k = 0; k <= p.time.nt; ++k)
    for (int i = 0; i < p.grid.n[0]; ++i)
      u.nodes[k][i] = 1.0 + 0.5 * std::sin(6.0 * p.grid.center(0, i) + 3.0 * p.time.t(k));
  return u;
}

}  // namespace testing
