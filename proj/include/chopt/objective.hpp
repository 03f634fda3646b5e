#pragma once

#include <array>
#include <optional>
#include <vector>

#include "chopt/control.hpp"
#include "chopt/state.hpp"

namespace chopt {

struct Relaxation {
  double gamma = 0.0;
  double eps = 0.0;
  Field sigma_Omega;

  bool operator==(const Relaxation&) const = default;
};

/// Weights and targets of
///
///   J(phi, sigma, u, tau) = b1/2 int_{Q_tau} |phi - phi_Q|^2 + b2/2 int |phi(tau) - phi_Omega|^2
///                         + b3/2 int_{Q_tau} |sigma - sigma_Q|^2 + b4/2 int (1 + phi(tau))
///                         + b5 tau + b6/2 |tau - tau*|^2 + b0/2 int_Q |u|^2
///
/// plus, when `relaxation` is set, gamma/(2 eps) int_{tau-eps}^{tau} int |sigma - sigma_Omega|^2
/// with sigma(t) = sigma_0 for t < 0.
struct CostSpec {
  std::array<double, 7> b{};          ///< b0 .. b6
  std::vector<Field> phi_Q;           ///< one target per time node
  std::vector<Field> sigma_Q;         ///< one target per time node
  Field phi_Omega;
  double tau_star = 0.0;
  std::optional<Relaxation> relaxation;

  void validate(const Grid& grid, const TimeGrid& time) const;

  /// Constant-in-time targets phi_Q = phi, sigma_Q = sigma on every node.
  static CostSpec with_constant_targets(const std::array<double, 7>& b, const Field& phi, const Field& sigma,
                                        const Field& phi_Omega, const TimeGrid& time, double tau_star);
};

struct CostBreakdown {
  double tracking_Q = 0.0;
  double tracking_Omega = 0.0;
  double nutrient_Q = 0.0;
  double tumour_mass = 0.0;
  double linear_time = 0.0;
  double quadratic_time = 0.0;
  double control_energy = 0.0;
  double relaxed_term = 0.0;
  double total = 0.0;
};

/// Time integrals over [0, tau] integrate the piecewise-linear interpolant of
/// the nodal space integrals exactly (trapezoid on whole intervals, exact on
/// the partial one); phi(tau) is interpolated; the control energy runs over
/// all of [0, T]. Ignores `cost.relaxation`.
CostBreakdown evaluate_cost(const StateTrajectory& state, const ControlField& u, double tau, const CostSpec& cost);

/// evaluate_cost plus the windowed nutrient term; requires cost.relaxation.
CostBreakdown evaluate_cost_relaxed(const StateTrajectory& state, const ControlField& u, double tau,
                                    const CostSpec& cost);

/// The reduced functional used by the optimiser: relaxed when a relaxation is
/// configured, plain otherwise.
CostBreakdown reduced_cost(const StateTrajectory& state, const ControlField& u, double tau, const CostSpec& cost);

struct TimeDerivative {
  double value = 0.0;   ///< D_tau J_red
  double lambda = 0.0;  ///< D_tau J_red - b6 (tau - tau*)
  bool forward_difference = false;  ///< tau = 0 needed phi_t from the first interval
};

/// Exact tau-derivative of the discrete reduced functional: the tracking
/// terms evaluate the interpolated nodal integrals at tau and phi_t(tau) is
/// the difference quotient over the interval containing tau (from the left at
/// nodes). Includes the relaxed term when configured.
TimeDerivative time_derivative(const StateTrajectory& state, double tau, const CostSpec& cost);

/// Lambda(u, tau) = D_tau J_red - b6 (tau - tau*).
double lambda_term(const StateTrajectory& state, double tau, const CostSpec& cost);

/// Partial derivatives of the discrete cost with respect to phi_j and sigma_j
/// (already multiplied by the quadrature weights), nodes 0..last_node.
struct StateSources {
  int last_node = 0;
  std::vector<Field> phi;
  std::vector<Field> sigma;
};

StateSources cost_state_sources(const StateTrajectory& state, double tau, const CostSpec& cost);

/// Riesz representative of D_u J_red in the discrete L2(Q) product:
/// node k gets r_k (zero beyond the adjoint horizon) plus b0 u_k.
ControlField control_gradient(const Trajectory& adjoint, const ControlField& u, double b0);

}  // namespace chopt
