#include "chopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chopt/adjoint.hpp"

namespace chopt {

const char* to_string(TimeCase c) {
  switch (c) {
    case TimeCase::BoundaryLow: return "boundary_low";
    case TimeCase::Interior: return "interior";
    case TimeCase::BoundaryHigh: return "boundary_high";
  }
  return "unknown";
}

const char* to_string(OptStatus s) {
  switch (s) {
    case OptStatus::Converged: return "converged";
    case OptStatus::MaxIterations: return "max_iterations";
    case OptStatus::LineSearchFailure: return "line_search_failure";
  }
  return "unknown";
}

void OptimizerConfig::validate() const {
  require(max_outer_iters >= 0, ErrorKind::InvalidArgument, "optimizer max_outer_iters must be >= 0");
  require(armijo.c1 > 0.0 && armijo.c1 < 1.0, ErrorKind::InvalidArgument, "Armijo c1 must lie in (0, 1)");
  require(armijo.backtrack > 0.0 && armijo.backtrack < 1.0, ErrorKind::InvalidArgument,
          "Armijo backtrack factor must lie in (0, 1)");
  require(armijo.s0 > 0.0 && armijo.max_backtracks >= 1, ErrorKind::InvalidArgument,
          "Armijo needs s0 > 0 and max_backtracks >= 1");
  require(grad_tol > 0.0, ErrorKind::InvalidArgument, "grad_tol must be positive");
  require(tau_step_scale > 0.0 && max_tau_steps >= 0, ErrorKind::InvalidArgument, "invalid tau step settings");
}

ControlField project_control(const ControlField& u, const ControlBounds& bounds) {
  require(bounds.lower.grid() == u.grid(), ErrorKind::ShapeMismatch, "bounds live on a different grid");
  ControlField p = u;
  for (Field& f : p.nodes)
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::clamp(f[i], bounds.lower[i], bounds.upper[i]);
  return p;
}

double control_stationarity(const ControlField& u, const ControlField& gradient, const ControlBounds& bounds,
                            double b0) {
  const double step = b0 > 0.0 ? 1.0 / b0 : 1.0;
  ControlField trial = u;
  trial.axpy(-step, gradient);
  return control_norm(u - project_control(trial, bounds)) / (1.0 + control_norm(u));
}

namespace {

double time_stationarity(double tau, double d_tau, double T, double cost) {
  return std::abs(tau - std::clamp(tau - d_tau, 0.0, T)) / (1.0 + std::abs(cost));
}

TimeCase time_case_of(double tau, const TimeGrid& time) {
  if (tau <= 0.5 * time.dt()) return TimeCase::BoundaryLow;
  if (tau >= time.T - 0.5 * time.dt()) return TimeCase::BoundaryHigh;
  return TimeCase::Interior;
}

bool recoverable(const Error& e) {
  return e.kind() == ErrorKind::NewtonDivergence || e.kind() == ErrorKind::SeparationViolation ||
         e.kind() == ErrorKind::NanDetected;
}

}  // namespace

TimeOptimalityReport classify_time_optimality(const StateTrajectory& state, const ControlField& u, double tau,
                                              const CostSpec& cost, double tol) {
  TimeOptimalityReport rep;
  const TimeDerivative td = time_derivative(state, tau, cost);
  rep.d_tau = td.value;
  rep.lambda = td.lambda;
  rep.cost = reduced_cost(state, u, tau, cost).total;
  rep.time_case = time_case_of(tau, state.time());
  const double slack = tol * (1.0 + std::abs(rep.cost));
  switch (rep.time_case) {
    case TimeCase::BoundaryLow: rep.satisfied = rep.d_tau >= -slack; break;
    case TimeCase::Interior: rep.satisfied = std::abs(rep.d_tau) <= slack; break;
    case TimeCase::BoundaryHigh: rep.satisfied = rep.d_tau <= slack; break;
  }
  if (cost.b[6] > 0.0 && rep.time_case == TimeCase::Interior)
    rep.fixed_point_residual = std::abs(tau - (cost.tau_star - rep.lambda / cost.b[6]));
  return rep;
}

OptResult optimize(const ModelParams& params, const InitialData& init, const CostSpec& cost,
                   const ControlBounds& bounds, const OptimizerConfig& config, const ControlField& u0, double tau0) {
  params.validate();
  config.validate();
  bounds.validate();
  cost.validate(params.grid, params.time);
  require(std::isfinite(tau0), ErrorKind::InvalidArgument, "initial tau must be finite");

  const TimeGrid& time = params.time;
  const double b0 = cost.b[0];
  const ArmijoOptions& arm = config.armijo;

  OptResult res;
  res.u_opt = project_control(u0, bounds);
  res.tau_opt = std::clamp(tau0, 0.0, time.T);
  ControlField& u = res.u_opt;
  double& tau = res.tau_opt;

  auto forward = [&](const ControlField& control) {
    StateTrajectory s = solve_state(params, init, control);
    ++res.state_solves;
    res.max_mass_residual = std::max(res.max_mass_residual, s.max_mass_residual());
    return s;
  };

  res.state = forward(u);
  double J = reduced_cost(res.state, u, tau, cost).total;

  ControlField prev_u, prev_g;
  bool have_prev = false;
  double tau_step = config.tau_step_scale;
  res.status = OptStatus::MaxIterations;

  for (int it = 0;; ++it) {
    const AdjointSolution adj = solve_adjoint(params, res.state, tau, cost);
    const ControlField g = control_gradient(adj.traj, u, b0);
    const TimeDerivative td = time_derivative(res.state, tau, cost);

    IterationRecord rec;
    rec.iteration = it;
    rec.cost = reduced_cost(res.state, u, tau, cost);
    J = rec.cost.total;
    rec.tau = tau;
    rec.control_stationarity = control_stationarity(u, g, bounds, b0);
    rec.time_stationarity = time_stationarity(tau, td.value, time.T, J);
    {
      ControlField trial = u;
      trial.axpy(-1.0, g);
      rec.projected_gradient_norm = control_norm(u - project_control(trial, bounds));
    }
    rec.d_tau = td.value;
    rec.time_case = time_case_of(tau, time);
    res.history.push_back(rec);

    if (rec.control_stationarity <= config.grad_tol && rec.time_stationarity <= config.grad_tol) {
      res.status = OptStatus::Converged;
      res.message = "stationarity below tolerance";
      break;
    }
    if (it >= config.max_outer_iters) {
      res.message = "iteration limit reached";
      break;
    }

    // Control block.
    if (rec.control_stationarity > config.grad_tol) {
      double s = arm.s0;
      if (have_prev) {
        const ControlField du = u - prev_u;
        const ControlField dg = g - prev_g;
        const double sy = control_inner(du, dg);
        const double ss = control_inner(du, du);
        if (sy > 0.0 && ss > 0.0) s = std::clamp(ss / sy, 1e-10, 1e10);
      }
      bool accepted = false;
      for (int bt = 0; bt <= arm.max_backtracks && !accepted; ++bt, s *= arm.backtrack) {
        ControlField trial = u;
        trial.axpy(-s, g);
        trial = project_control(trial, bounds);
        const double expected = -control_inner(g, trial - u);
        if (!(expected > 0.0)) break;
        StateTrajectory st;
        try {
          st = forward(trial);
        } catch (const Error& e) {
          if (!recoverable(e)) throw;
          continue;
        }
        const double Jt = reduced_cost(st, trial, tau, cost).total;
        if (Jt <= J - arm.c1 * expected) {
          prev_u = u;
          prev_g = g;
          have_prev = true;
          u = std::move(trial);
          res.state = std::move(st);
          J = Jt;
          accepted = true;
        }
      }
      if (!accepted) {
        if (rec.control_stationarity <= 10.0 * config.grad_tol && rec.time_stationarity <= 10.0 * config.grad_tol) {
          res.status = OptStatus::Converged;
          res.message = "no further decrease above round-off; stationarity within 10 grad_tol";
        } else {
          res.status = OptStatus::LineSearchFailure;
          std::ostringstream msg;
          msg << "control line search failed after " << arm.max_backtracks << " backtracks at iteration " << it
              << " (stationarity " << rec.control_stationarity << ")";
          res.message = msg.str();
        }
        break;
      }
    }

    // Time block on the current state.
    for (int step = 0; step < config.max_tau_steps; ++step) {
      const double d = time_derivative(res.state, tau, cost).value;
      if (time_stationarity(tau, d, time.T, J) <= 0.1 * config.grad_tol) break;
      double s = tau_step;
      bool accepted = false;
      for (int bt = 0; bt <= arm.max_backtracks; ++bt, s *= arm.backtrack) {
        const double trial = std::clamp(tau - s * d, 0.0, time.T);
        const double expected = d * (tau - trial);
        if (!(expected > 0.0)) break;
        const double Jt = reduced_cost(res.state, u, trial, cost).total;
        if (Jt <= J - arm.c1 * expected) {
          tau_step = bt == 0 ? 2.0 * s : s;
          tau = trial;
          J = Jt;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
  }

  res.cost = reduced_cost(res.state, u, tau, cost);
  res.time_case = time_case_of(tau, time);
  return res;
}

}  // namespace chopt
