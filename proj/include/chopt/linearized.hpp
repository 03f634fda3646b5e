#pragma once

#include "chopt/control.hpp"
#include "chopt/state.hpp"

namespace chopt {

/// Directional derivative DS(u) h of the control-to-state map, as the exact
/// linearisation of the discrete state update around `state`:
///
///   alpha eta_t + theta_t - Lap eta = P'(phi)(sigma - mu) theta + P(phi)(rho - eta)
///   eta = beta theta_t - Lap theta + F''(phi) theta
///   rho_t - Lap rho = -P'(phi)(sigma - mu) theta - P(phi)(rho - eta) + h
///
/// with zero initial data. Frames are (eta, theta, rho) on all nt + 1 nodes.
Trajectory solve_linearized(const ModelParams& params, const StateTrajectory& state, const ControlField& h);

}  // namespace chopt
