#include "chopt/objective.hpp"

#include <algorithm>
#include <cmath>

namespace chopt {

namespace {

double squared_distance(const Field& a, const Field& b) {
  check_same_grid(a, b);
  const double vol = a.grid().cell_volume();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum * vol;
}

// Sum of w_k * |f_k - target_k|^2 over nodes with nonzero weight.
double weighted_tracking(const std::vector<double>& w, const StateTrajectory& state, int component,
                         const std::vector<Field>& target) {
  double sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] != 0.0) sum += w[k] * squared_distance(state.traj.at(static_cast<int>(k), component), target[k]);
  return sum;
}

// |f(tau) - target(tau)|^2 through the interpolant of the nodal integrals.
double interpolated_tracking(const StateTrajectory& state, int component, const std::vector<Field>& target,
                             double tau) {
  const TimeLocation loc = state.time().locate(tau);
  if (loc.at_node) return squared_distance(state.traj.at(loc.node, component), target[loc.node]);
  const double g0 = squared_distance(state.traj.at(loc.k, component), target[loc.k]);
  const double g1 = squared_distance(state.traj.at(loc.k + 1, component), target[loc.k + 1]);
  return (1.0 - loc.s) * g0 + loc.s * g1;
}

double nutrient_gap(const StateTrajectory& state, const Field& sigma_Omega, double t) {
  if (t <= 0.0) return squared_distance(state.sigma(0), sigma_Omega);
  const TimeLocation loc = state.time().locate(t);
  if (loc.at_node) return squared_distance(state.sigma(loc.node), sigma_Omega);
  return (1.0 - loc.s) * squared_distance(state.sigma(loc.k), sigma_Omega) +
         loc.s * squared_distance(state.sigma(loc.k + 1), sigma_Omega);
}

void check_inputs(const StateTrajectory& state, double tau, const CostSpec& cost) {
  require(!state.traj.frames.empty(), ErrorKind::ShapeMismatch, "empty state trajectory");
  require(state.traj.frames.size() == static_cast<std::size_t>(state.time().node_count()),
          ErrorKind::ShapeMismatch, "state trajectory does not cover its time grid");
  cost.validate(state.traj.grid(), state.time());
  state.time().locate(tau);
}

void finalize(CostBreakdown& c) {
  c.total = c.tracking_Q + c.tracking_Omega + c.nutrient_Q + c.tumour_mass + c.linear_time + c.quadratic_time +
            c.control_energy + c.relaxed_term;
}

CostBreakdown base_terms(const StateTrajectory& state, const ControlField& u, double tau, const CostSpec& cost) {
  check_inputs(state, tau, cost);
  require(u.time == state.time() && u.node_count() == state.traj.frames.size() && u.grid() == state.traj.grid(),
          ErrorKind::ShapeMismatch, "control does not match the state trajectory");
  const auto& b = cost.b;
  CostBreakdown c;
  if (b[1] != 0.0 || b[3] != 0.0) {
    const std::vector<double> w = hat_weights(state.time(), 0.0, tau);
    if (b[1] != 0.0) c.tracking_Q = 0.5 * b[1] * weighted_tracking(w, state, kPhi, cost.phi_Q);
    if (b[3] != 0.0) c.nutrient_Q = 0.5 * b[3] * weighted_tracking(w, state, kSigma, cost.sigma_Q);
  }
  if (b[2] != 0.0 || b[4] != 0.0) {
    const Field phi_tau = interpolate_in_time(state.traj, kPhi, tau);
    if (b[2] != 0.0) c.tracking_Omega = 0.5 * b[2] * squared_distance(phi_tau, cost.phi_Omega);
    if (b[4] != 0.0) c.tumour_mass = 0.5 * b[4] * (integrate(phi_tau) + phi_tau.grid().cell_volume() * phi_tau.size());
  }
  c.linear_time = b[5] * tau;
  c.quadratic_time = 0.5 * b[6] * (tau - cost.tau_star) * (tau - cost.tau_star);
  if (b[0] != 0.0) c.control_energy = 0.5 * b[0] * control_inner(u, u);
  return c;
}

}  // namespace

void CostSpec::validate(const Grid& grid, const TimeGrid& time) const {
  bool any = false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    require(std::isfinite(b[i]) && b[i] >= 0.0, ErrorKind::InvalidArgument,
            "cost weight b" + std::to_string(i) + " must be a non-negative number");
    any = any || b[i] > 0.0;
  }
  require(any, ErrorKind::InvalidArgument, "cost weights b0..b6 must not all be zero");
  const auto nodes = static_cast<std::size_t>(time.node_count());
  require(phi_Q.size() == nodes && sigma_Q.size() == nodes, ErrorKind::ShapeMismatch,
          "tracking targets need one field per time node");
  for (std::size_t k = 0; k < nodes; ++k)
    require(phi_Q[k].grid() == grid && sigma_Q[k].grid() == grid, ErrorKind::ShapeMismatch,
            "tracking target lives on a different grid");
  require(phi_Omega.grid() == grid, ErrorKind::ShapeMismatch, "final-time target lives on a different grid");
  require(std::isfinite(tau_star) && tau_star >= 0.0 && tau_star <= time.T, ErrorKind::InvalidArgument,
          "target time tau* must lie in [0, T]");
  if (relaxation) {
    require(std::isfinite(relaxation->gamma) && relaxation->gamma >= 0.0, ErrorKind::InvalidArgument,
            "relaxation gamma must be non-negative");
    require(std::isfinite(relaxation->eps) && relaxation->eps > 0.0, ErrorKind::InvalidArgument,
            "relaxation eps must be positive");
    require(relaxation->sigma_Omega.grid() == grid, ErrorKind::ShapeMismatch,
            "relaxation target lives on a different grid");
  }
}

CostSpec CostSpec::with_constant_targets(const std::array<double, 7>& b, const Field& phi, const Field& sigma,
                                         const Field& phi_Omega, const TimeGrid& time, double tau_star) {
  CostSpec c;
  c.b = b;
  c.phi_Q.assign(time.node_count(), phi);
  c.sigma_Q.assign(time.node_count(), sigma);
  c.phi_Omega = phi_Omega;
  c.tau_star = tau_star;
  return c;
}

CostBreakdown evaluate_cost(const StateTrajectory& state, const ControlField& u, double tau, const CostSpec& cost) {
  CostBreakdown c = base_terms(state, u, tau, cost);
  finalize(c);
  return c;
}

CostBreakdown evaluate_cost_relaxed(const StateTrajectory& state, const ControlField& u, double tau,
                                    const CostSpec& cost) {
  require(cost.relaxation.has_value(), ErrorKind::InvalidArgument, "relaxed cost needs a relaxation block");
  CostBreakdown c = base_terms(state, u, tau, cost);
  const Relaxation& rel = *cost.relaxation;
  if (rel.gamma != 0.0) {
    const double start = std::max(tau - rel.eps, 0.0);
    const std::vector<double> w = hat_weights(state.time(), start, tau);
    double window = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (w[k] != 0.0) window += w[k] * squared_distance(state.sigma(static_cast<int>(k)), rel.sigma_Omega);
    if (rel.eps > tau) window += (rel.eps - tau) * squared_distance(state.sigma(0), rel.sigma_Omega);
    c.relaxed_term = rel.gamma / (2.0 * rel.eps) * window;
  }
  finalize(c);
  return c;
}

CostBreakdown reduced_cost(const StateTrajectory& state, const ControlField& u, double tau, const CostSpec& cost) {
  return cost.relaxation ? evaluate_cost_relaxed(state, u, tau, cost) : evaluate_cost(state, u, tau, cost);
}

TimeDerivative time_derivative(const StateTrajectory& state, double tau, const CostSpec& cost) {
  check_inputs(state, tau, cost);
  const auto& b = cost.b;
  const TimeGrid& time = state.time();
  const TimeLocation loc = time.locate(tau);
  TimeDerivative d;
  double value = 0.0;
  if (b[1] != 0.0) value += 0.5 * b[1] * interpolated_tracking(state, kPhi, cost.phi_Q, tau);
  if (b[3] != 0.0) value += 0.5 * b[3] * interpolated_tracking(state, kSigma, cost.sigma_Q, tau);
  if (b[2] != 0.0 || b[4] != 0.0) {
    d.forward_difference = loc.at_node && loc.node == 0;
    // phi_t on the interval containing tau (the first one when tau = 0)
    Field phi_t = state.phi(loc.k + 1) - state.phi(loc.k);
    phi_t *= 1.0 / time.dt();
    if (b[2] != 0.0) {
      const Field phi_tau = interpolate_in_time(state.traj, kPhi, tau);
      value += b[2] * inner(phi_tau - cost.phi_Omega, phi_t);
    }
    if (b[4] != 0.0) value += 0.5 * b[4] * integrate(phi_t);
  }
  value += b[5];
  value += b[6] * (tau - cost.tau_star);
  if (cost.relaxation && cost.relaxation->gamma != 0.0) {
    const Relaxation& rel = *cost.relaxation;
    value += rel.gamma / (2.0 * rel.eps) *
             (nutrient_gap(state, rel.sigma_Omega, tau) - nutrient_gap(state, rel.sigma_Omega, tau - rel.eps));
  }
  d.value = value;
  d.lambda = value - b[6] * (tau - cost.tau_star);
  return d;
}

double lambda_term(const StateTrajectory& state, double tau, const CostSpec& cost) {
  return time_derivative(state, tau, cost).lambda;
}

StateSources cost_state_sources(const StateTrajectory& state, double tau, const CostSpec& cost) {
  check_inputs(state, tau, cost);
  const auto& b = cost.b;
  const TimeGrid& time = state.time();
  const TimeLocation loc = time.locate(tau);
  StateSources src;
  src.last_node = loc.at_node ? loc.node : loc.k + 1;
  const Grid& grid = state.traj.grid();
  src.phi.assign(src.last_node + 1, Field(grid));
  src.sigma.assign(src.last_node + 1, Field(grid));

  const std::vector<double> w = hat_weights(time, 0.0, tau);
  for (int j = 0; j <= src.last_node; ++j) {
    if (w[j] == 0.0) continue;
    if (b[1] != 0.0) src.phi[j].axpy(b[1] * w[j], state.phi(j) - cost.phi_Q[j]);
    if (b[3] != 0.0) src.sigma[j].axpy(b[3] * w[j], state.sigma(j) - cost.sigma_Q[j]);
  }

  if (b[2] != 0.0 || b[4] != 0.0) {
    Field final_src(grid, 0.5 * b[4]);
    if (b[2] != 0.0) final_src.axpy(b[2], interpolate_in_time(state.traj, kPhi, tau) - cost.phi_Omega);
    if (loc.at_node) {
      src.phi[loc.node] += final_src;
    } else {
      src.phi[loc.k].axpy(1.0 - loc.s, final_src);
      src.phi[loc.k + 1].axpy(loc.s, final_src);
    }
  }

  if (cost.relaxation && cost.relaxation->gamma != 0.0) {
    const Relaxation& rel = *cost.relaxation;
    const std::vector<double> we = hat_weights(time, std::max(tau - rel.eps, 0.0), tau);
    for (int j = 0; j <= src.last_node; ++j)
      if (we[j] != 0.0) src.sigma[j].axpy(rel.gamma / rel.eps * we[j], state.sigma(j) - rel.sigma_Omega);
  }
  return src;
}

ControlField control_gradient(const Trajectory& adjoint, const ControlField& u, double b0) {
  require(adjoint.time == u.time, ErrorKind::ShapeMismatch, "adjoint and control use different time grids");
  require(!adjoint.frames.empty() && adjoint.frames.size() <= u.node_count(), ErrorKind::ShapeMismatch,
          "adjoint horizon exceeds the control horizon");
  require(adjoint.grid() == u.grid(), ErrorKind::ShapeMismatch, "adjoint and control live on different grids");
  ControlField g = ControlField::zeros_like(u);
  for (std::size_t k = 0; k < adjoint.frames.size(); ++k) g.nodes[k] = adjoint.frames[k][kR];
  if (b0 != 0.0) g.axpy(b0, u);
  return g;
}

}  // namespace chopt
