#include "chopt/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coupled_system.hpp"
#include "step_operators.hpp"

namespace chopt {

void ModelParams::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0 && std::isfinite(beta) && beta > 0.0,
          ErrorKind::InvalidArgument, "alpha, beta are positive constants (got alpha = " +
                                          std::to_string(alpha) + ", beta = " + std::to_string(beta) + ")");
  grid.validate();
  time.validate();
  if (potential.kind == PotentialKind::Logarithmic)
    require(std::isfinite(potential.lambda) && potential.lambda > 0.0, ErrorKind::InvalidArgument,
            "logarithmic potential needs lambda > 0");
  require(proliferation.p0 >= 0.0 && std::isfinite(proliferation.p0), ErrorKind::InvalidArgument,
          "proliferation magnitude P0 must be non-negative");
  if (proliferation.kind == ProliferationKind::SmoothRamp)
    require(proliferation.width > 0.0, ErrorKind::InvalidArgument, "proliferation ramp width must be positive");
  require(newton.max_iter >= 1 && newton.tol > 0.0, ErrorKind::InvalidArgument, "invalid Newton options");
}

void InitialData::validate(const Grid& grid, const Potential& potential) const {
  for (const Field* f : {&mu0, &phi0, &sigma0}) {
    require(f->grid() == grid, ErrorKind::Dimension, "initial data lives on a different grid");
    require(f->all_finite(), ErrorKind::InvalidArgument, "initial data must be finite");
  }
  if (potential.is_singular()) {
    require(phi0.min() > potential.lower_bound() && phi0.max() < potential.upper_bound(), ErrorKind::Domain,
            "initial phase must satisfy r_- < inf phi0 <= sup phi0 < r_+");
  }
}

double StateTrajectory::max_mass_residual() const {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.mass_residual);
  return m;
}

double conserved_mass(const Triple& frame, double alpha) {
  Field total = frame[kPhi] + frame[kSigma];
  total.axpy(alpha, frame[kMu]);
  return integrate(total);
}

namespace {

struct StepContext {
  const ModelParams& params;
  const Triple& prev;
  const Field& u;
  Field pi_prev;  // pi(phi^k)
  Field p_prev;   // P(phi^k)
};

// Residual of the dt-scaled step equations, interleaved; returns sup-norm.
double step_residual(const StepContext& ctx, const Triple& z, std::vector<double>& r) {
  const ModelParams& prm = ctx.params;
  const double dt = prm.time.dt();
  const Field lap_mu = laplacian_neumann(z[kMu]);
  const Field lap_phi = laplacian_neumann(z[kPhi]);
  const Field lap_sigma = laplacian_neumann(z[kSigma]);
  double sup = 0.0;
  for (std::size_t i = 0; i < z[0].size(); ++i) {
    const double mu = z[kMu][i];
    const double phi = z[kPhi][i];
    const double sigma = z[kSigma][i];
    const double exchange = dt * ctx.p_prev[i] * (sigma - mu);
    const double bp = potential_split_eval(prm.potential, phi, PotentialPart::Convex, 1);
    r[3 * i + 0] = prm.alpha * (mu - ctx.prev[kMu][i]) + (phi - ctx.prev[kPhi][i]) - dt * lap_mu[i] - exchange;
    r[3 * i + 1] = -dt * mu + prm.beta * (phi - ctx.prev[kPhi][i]) - dt * lap_phi[i] + dt * bp + dt * ctx.pi_prev[i];
    r[3 * i + 2] = (sigma - ctx.prev[kSigma][i]) - dt * lap_sigma[i] + exchange - dt * ctx.u[i];
    for (int c = 0; c < 3; ++c) sup = std::max(sup, std::abs(r[3 * i + c]));
  }
  return sup;
}

void clamp_phase(Field& phi, const Potential& pot, double margin) {
  if (!pot.is_singular()) return;
  const double lo = pot.lower_bound() + margin;
  const double hi = pot.upper_bound() - margin;
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::clamp(phi[i], lo, hi);
}

double separation_distance(const Field& phi, const Potential& pot) {
  if (!pot.is_singular()) return std::numeric_limits<double>::infinity();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i)
    d = std::min({d, phi[i] - pot.lower_bound(), pot.upper_bound() - phi[i]});
  return d;
}

std::string step_label(int step) { return "step " + std::to_string(step); }

}  // namespace

StateTrajectory solve_state(const ModelParams& params, const InitialData& init, const ControlField& u) {
  params.validate();
  init.validate(params.grid, params.potential);
  require(u.time == params.time && u.node_count() == static_cast<std::size_t>(params.time.node_count()),
          ErrorKind::ShapeMismatch, "control does not match the model time grid");
  require(u.grid() == params.grid, ErrorKind::ShapeMismatch, "control does not match the model grid");

  const Grid& grid = params.grid;
  const std::size_t n = grid.cell_count();
  const double dt = params.time.dt();
  const Potential& pot = params.potential;
  const double margin = pot.is_singular() ? params.newton.clamp_fraction * (pot.upper_bound() - pot.lower_bound()) : 0.0;

  StateTrajectory out;
  out.traj.time = params.time;
  out.traj.frames.reserve(params.time.node_count());
  out.traj.frames.push_back({init.mu0, init.phi0, init.sigma0});
  out.steps.reserve(params.time.nt);

  const double mass0 = conserved_mass(out.traj.frames[0], params.alpha);
  double drift = 0.0;

  detail::CoupledSystem sys(grid, dt);
  std::vector<double> r(3 * n), r_trial(3 * n), delta(3 * n);

  for (int k = 0; k < params.time.nt; ++k) {
    const Triple& prev = out.traj.frames[k];
    StepContext ctx{params, prev, u.nodes[k], Field(grid), Field(grid)};
    for (std::size_t i = 0; i < n; ++i) {
      ctx.pi_prev[i] = potential_split_eval(pot, prev[kPhi][i], PotentialPart::Smooth, 1);
      ctx.p_prev[i] = proliferation_eval(params.proliferation, prev[kPhi][i], 0);
    }

    Triple z = prev;
    double res = step_residual(ctx, z, r);
    int iters = 0;
    bool converged = res <= params.newton.tol;
    bool polished = converged && res <= 1e-3 * params.newton.tol;
    while (!(converged && polished)) {
      if (converged) polished = true;
      if (iters >= params.newton.max_iter) {
        std::ostringstream msg;
        msg << step_label(k + 1) << ": Newton did not converge in " << params.newton.max_iter
            << " iterations (residual " << res << "); reduce dt";
        fail(ErrorKind::NewtonDivergence, msg.str());
      }
      detail::assemble_step_jacobian(params, prev[kPhi], z[kPhi], sys);
      sys.factorize();
      delta = r;
      sys.solve(delta);
      ++iters;

      double lambda = 1.0;
      Triple trial = z;
      double trial_res = 0.0;
      for (int h = 0; h <= params.newton.max_damping_halvings; ++h) {
        for (std::size_t i = 0; i < n; ++i)
          for (int c = 0; c < 3; ++c) trial[c][i] = z[c][i] - lambda * delta[3 * i + c];
        clamp_phase(trial[kPhi], pot, margin);
        trial_res = step_residual(ctx, trial, r_trial);
        if (std::isfinite(trial_res) && (trial_res < res || converged)) break;
        lambda *= 0.5;
      }
      z = std::move(trial);
      std::swap(r, r_trial);
      res = trial_res;
      if (!std::isfinite(res)) fail(ErrorKind::NanDetected, step_label(k + 1) + ": non-finite Newton residual");
      // Polish only when the tolerance was met with room left above round-off.
      if (!converged && res <= params.newton.tol) {
        converged = true;
        polished = res <= 1e-3 * params.newton.tol;
      }
    }

    for (const Field& f : z)
      if (!f.all_finite()) fail(ErrorKind::NanDetected, step_label(k + 1) + ": non-finite state");

    StepDiagnostics diag;
    diag.step = k + 1;
    diag.newton_iters = iters;
    diag.residual = res;
    diag.delta_sep = separation_distance(z[kPhi], pot);
    if (pot.is_singular() && diag.delta_sep <= margin * (1.0 + 1e-9)) {
      std::ostringstream msg;
      msg << step_label(k + 1) << ": phase reached the boundary of the potential domain (delta_sep = "
          << diag.delta_sep << ")";
      fail(ErrorKind::SeparationViolation, msg.str());
    }
    drift += dt * integrate(u.nodes[k]);
    diag.mass_residual = std::abs(conserved_mass(z, params.alpha) - mass0 - drift) / (1.0 + std::abs(mass0));
    out.traj.frames.push_back(std::move(z));
    out.steps.push_back(diag);
  }
  return out;
}

SeparationReport separation_report(const Trajectory& traj, const Potential& potential) {
  SeparationReport rep;
  rep.delta_sep = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.frames.size(); ++k) {
    const double d = separation_distance(traj.frames[k][kPhi], potential);
    if (d < rep.delta_sep) {
      rep.delta_sep = d;
      rep.argmin_frame = static_cast<int>(k);
    }
  }
  if (!potential.is_singular()) rep.delta_sep = std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace chopt
