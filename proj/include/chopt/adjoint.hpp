#pragma once

#include <vector>

#include "chopt/objective.hpp"
#include "chopt/state.hpp"

namespace chopt {

/// beta q(tau) = b2 (phi(tau) - phi_Omega) + b4 / 2,  p(tau) = 0,  r(tau) = 0.
struct AdjointTerminalData {
  Field q;
  Field p;
  Field r;

  static AdjointTerminalData build(const ModelParams& params, const StateTrajectory& state, double tau,
                                   const CostSpec& cost);
};

struct AdjointSolution {
  /// (q, p, r) on nodes 0 .. last_node; the last frame is the terminal data.
  Trajectory traj;
  int last_node = 0;
  double tau = 0.0;
  /// tau minus the nearest grid node.
  double snap_offset = 0.0;
  /// sup-norm of A^T x - rhs for each backward step, ordered by node 0 .. last_node - 1.
  std::vector<double> step_residuals;
};

/// Backward solve of
///
///   -beta q_t - p_t - Lap q + F''(phi) q + P'(phi)(sigma - mu)(r - p) = b1 (phi - phi_Q)
///   -alpha p_t - Lap p - q + P(phi)(p - r) = 0
///   -r_t - Lap r + P(phi)(r - p) = b3 (sigma - sigma_Q) [+ gamma/eps 1_(tau-eps, tau) (sigma - sigma_Omega)]
///
/// on [0, tau], discretised as the exact transpose of the linearised update so
/// that the discrete duality identity holds to round-off. The horizon ends at
/// the first node at or after tau; when tau is off the grid, the terminal data
/// and the tau-localised sources are spread over the bracketing nodes with
/// the interpolation weights.
AdjointSolution solve_adjoint(const ModelParams& params, const StateTrajectory& state, double tau,
                              const CostSpec& cost);

/// Same with tau = t_{tau_index}.
AdjointSolution solve_adjoint(const ModelParams& params, const StateTrajectory& state, int tau_index,
                              const CostSpec& cost);

}  // namespace chopt
