#include "chopt/adjoint.hpp"

#include <algorithm>
#include <cmath>

#include "coupled_system.hpp"
#include "step_operators.hpp"

namespace chopt {

namespace {

// Position of the multipliers inside an interleaved cell: each equation row
// of the step pairs with one adjoint field.
constexpr int kRowP = 0, kRowQ = 1, kRowR = 2;

void check_state(const ModelParams& params, const StateTrajectory& state) {
  require(state.time() == params.time &&
              state.traj.frames.size() == static_cast<std::size_t>(params.time.node_count()),
          ErrorKind::ShapeMismatch, "state trajectory does not match the model time grid");
  require(state.traj.grid() == params.grid, ErrorKind::ShapeMismatch, "state lives on a different grid");
}

}  // namespace

AdjointTerminalData AdjointTerminalData::build(const ModelParams& params, const StateTrajectory& state, double tau,
                                               const CostSpec& cost) {
  const Grid& grid = params.grid;
  AdjointTerminalData d{Field(grid, 0.5 * cost.b[4]), Field(grid), Field(grid)};
  if (cost.b[2] != 0.0) d.q.axpy(cost.b[2], interpolate_in_time(state.traj, kPhi, tau) - cost.phi_Omega);
  d.q *= 1.0 / params.beta;
  return d;
}

AdjointSolution solve_adjoint(const ModelParams& params, const StateTrajectory& state, double tau,
                              const CostSpec& cost) {
  params.validate();
  check_state(params, state);
  const StateSources src = cost_state_sources(state, tau, cost);
  const int last = src.last_node;
  const std::size_t n = params.grid.cell_count();
  const double dt = params.time.dt();

  AdjointSolution sol;
  sol.tau = tau;
  sol.last_node = last;
  sol.snap_offset = tau - params.time.t(params.time.nearest_node(tau));
  sol.traj.time = params.time;
  const Field zero(params.grid);
  sol.traj.frames.assign(last + 1, Triple{zero, zero, zero});
  sol.step_residuals.assign(last, 0.0);

  const AdjointTerminalData term = AdjointTerminalData::build(params, state, tau, cost);
  sol.traj.frames[last] = {term.q, term.p, term.r};

  // Multiplier of step j (t_{j-1} -> t_j) solves
  //   A_j^T lam_j = s_j + B_j^T lam_{j+1},  lam_{last+1} = 0,
  // and frame j - 1 stores lam_j.
  detail::CoupledSystem sys(params.grid, dt);
  std::vector<double> lam_next(3 * n, 0.0), rhs(3 * n), check(3 * n);
  for (int j = last; j >= 1; --j) {
    if (j < last) {
      const auto blocks = detail::explicit_blocks(params, state.traj.frames[j], state.traj.frames[j + 1]);
      detail::apply_blocks(blocks, lam_next, rhs, true);
    } else {
      std::fill(rhs.begin(), rhs.end(), 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      rhs[3 * i + kRowQ] += src.phi[j][i];
      rhs[3 * i + kRowR] += src.sigma[j][i];
    }
    detail::assemble_step_jacobian(params, state.phi(j - 1), state.phi(j), sys);
    sys.factorize();
    std::vector<double> lam = rhs;
    sys.solve_transposed(lam);

    sys.apply(lam, check, true);
    double res = 0.0;
    for (std::size_t i = 0; i < 3 * n; ++i) res = std::max(res, std::abs(check[i] - rhs[i]));
    sol.step_residuals[j - 1] = res;

    Triple& frame = sol.traj.frames[j - 1];
    for (std::size_t i = 0; i < n; ++i) {
      frame[kQ][i] = lam[3 * i + kRowQ];
      frame[kP][i] = lam[3 * i + kRowP];
      frame[kR][i] = lam[3 * i + kRowR];
    }
    for (const Field& f : frame)
      if (!f.all_finite()) fail(ErrorKind::NanDetected, "adjoint step " + std::to_string(j) + ": non-finite value");
    lam_next = std::move(lam);
  }
  for (const Field& f : sol.traj.frames[last])
    if (!f.all_finite()) fail(ErrorKind::NanDetected, "adjoint terminal data is not finite");
  return sol;
}

AdjointSolution solve_adjoint(const ModelParams& params, const StateTrajectory& state, int tau_index,
                              const CostSpec& cost) {
  require(tau_index >= 0 && tau_index <= params.time.nt, ErrorKind::InvalidArgument,
          "tau index " + std::to_string(tau_index) + " outside 0.." + std::to_string(params.time.nt));
  return solve_adjoint(params, state, params.time.t(tau_index), cost);
}

}  // namespace chopt
