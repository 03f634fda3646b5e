#include "chopt/linearized.hpp"

#include "coupled_system.hpp"
#include "step_operators.hpp"

namespace chopt {

Trajectory solve_linearized(const ModelParams& params, const StateTrajectory& state, const ControlField& h) {
  const TimeGrid& time = params.time;
  require(state.time() == time && state.traj.frames.size() == static_cast<std::size_t>(time.node_count()),
          ErrorKind::ShapeMismatch, "state trajectory does not match the model time grid");
  require(state.traj.grid() == params.grid, ErrorKind::ShapeMismatch, "state lives on a different grid");
  require(h.time == time && h.node_count() == static_cast<std::size_t>(time.node_count()) &&
              h.grid() == params.grid,
          ErrorKind::ShapeMismatch, "perturbation does not match the model grids");

  const std::size_t n = params.grid.cell_count();
  const double dt = time.dt();
  Trajectory out;
  out.time = time;
  out.frames.reserve(time.node_count());
  const Field zero(params.grid);
  out.frames.push_back({zero, zero, zero});

  detail::CoupledSystem sys(params.grid, dt);
  std::vector<double> prev(3 * n, 0.0), rhs(3 * n);
  for (int k = 0; k < time.nt; ++k) {
    const Triple& s_prev = state.traj.frames[k];
    const Triple& s_next = state.traj.frames[k + 1];
    const auto blocks = detail::explicit_blocks(params, s_prev, s_next);
    detail::apply_blocks(blocks, prev, rhs, false);
    const Field& hk = h.nodes[k];
    for (std::size_t i = 0; i < n; ++i) rhs[3 * i + 2] += dt * hk[i];
    detail::assemble_step_jacobian(params, s_prev[kPhi], s_next[kPhi], sys);
    sys.factorize();
    sys.solve(rhs);
    Triple frame{zero, zero, zero};
    detail::unpack(rhs, frame);
    for (const Field& f : frame)
      if (!f.all_finite())
        fail(ErrorKind::NanDetected, "linearised step " + std::to_string(k + 1) + ": non-finite value");
    out.frames.push_back(std::move(frame));
    std::swap(prev, rhs);
  }
  return out;
}

}  // namespace chopt
