#pragma once

#include <vector>

#include "chopt/control.hpp"
#include "chopt/fields.hpp"
#include "chopt/potentials.hpp"

namespace chopt {

// Slot indices of the field triples.
inline constexpr int kMu = 0, kPhi = 1, kSigma = 2;     // state
inline constexpr int kEta = 0, kTheta = 1, kRho = 2;    // linearised
inline constexpr int kQ = 0, kP = 1, kR = 2;            // adjoint

struct NewtonOptions {
  int max_iter = 50;
  double tol = 1e-11;             ///< sup-norm of the step residual
  double clamp_fraction = 1e-6;   ///< interior margin for singular potentials, relative to r_+ - r_-
  int max_damping_halvings = 10;

  bool operator==(const NewtonOptions&) const = default;
};

struct ModelParams {
  double alpha = 0.0;
  double beta = 0.0;
  Potential potential;
  Proliferation proliferation;
  Grid grid;
  TimeGrid time;
  NewtonOptions newton;

  void validate() const;
};

struct InitialData {
  Field mu0;
  Field phi0;
  Field sigma0;

  void validate(const Grid& grid, const Potential& potential) const;
};

struct StepDiagnostics {
  int step = 0;            ///< index of the node produced (1..nt)
  int newton_iters = 0;
  double residual = 0.0;   ///< final step residual (sup-norm)
  double mass_residual = 0.0;
  double delta_sep = 0.0;  ///< distance of phi to the potential's domain boundary
};

/// Trajectory of (mu, phi, sigma) plus per-step solver diagnostics.
struct StateTrajectory {
  Trajectory traj;
  std::vector<StepDiagnostics> steps;

  const Field& mu(int k) const { return traj.at(k, kMu); }
  const Field& phi(int k) const { return traj.at(k, kPhi); }
  const Field& sigma(int k) const { return traj.at(k, kSigma); }
  const TimeGrid& time() const { return traj.time; }
  double max_mass_residual() const;
};

/// Forward solve of the viscous Cahn-Hilliard tumour system
///
///   alpha mu_t + phi_t - Lap mu = P(phi)(sigma - mu)
///   mu = beta phi_t - Lap phi + F'(phi)
///   sigma_t - Lap sigma = -P(phi)(sigma - mu) + u
///
/// with homogeneous Neumann conditions. Each step is semi-implicit with
/// convex splitting: Laplacians, B'(phi^{k+1}) and the exchange term
/// P(phi^k)(sigma^{k+1} - mu^{k+1}) implicit; pi(phi^k) explicit; u_k held on
/// [t_k, t_{k+1}). The nonlinear step is solved by damped Newton.
StateTrajectory solve_state(const ModelParams& params, const InitialData& init, const ControlField& u);

struct SeparationReport {
  double delta_sep = 0.0;
  int argmin_frame = 0;
};

/// delta_sep = min over frames and cells of min(phi - r_-, r_+ - phi).
SeparationReport separation_report(const Trajectory& traj, const Potential& potential);

/// integrate(alpha mu + phi + sigma) over one frame.
double conserved_mass(const Triple& frame, double alpha);

}  // namespace chopt
