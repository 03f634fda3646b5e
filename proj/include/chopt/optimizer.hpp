#pragma once

#include <string>
#include <vector>

#include "chopt/control.hpp"
#include "chopt/objective.hpp"
#include "chopt/state.hpp"

namespace chopt {

struct ArmijoOptions {
  double c1 = 1e-4;
  double backtrack = 0.5;
  double s0 = 1.0;  ///< first trial step; later iterations use the Barzilai-Borwein step
  int max_backtracks = 30;

  bool operator==(const ArmijoOptions&) const = default;
};

struct OptimizerConfig {
  int max_outer_iters = 300;
  ArmijoOptions armijo;
  double grad_tol = 1e-6;        ///< on both stationarity measures
  double tau_step_scale = 1.0;   ///< first trial step of the tau block
  int max_tau_steps = 60;        ///< projected steps in tau per outer iteration

  void validate() const;
  bool operator==(const OptimizerConfig&) const = default;
};

enum class TimeCase { BoundaryLow, Interior, BoundaryHigh };
const char* to_string(TimeCase c);

enum class OptStatus { Converged, MaxIterations, LineSearchFailure };
const char* to_string(OptStatus s);

struct IterationRecord {
  int iteration = 0;
  CostBreakdown cost;
  double tau = 0.0;
  double control_stationarity = 0.0;  ///< |u - P(u - grad / b0)| / (1 + |u|), or with unit step if b0 = 0
  double time_stationarity = 0.0;     ///< |tau - clamp(tau - D_tau J)| / (1 + |J|)
  double projected_gradient_norm = 0.0;
  double d_tau = 0.0;
  TimeCase time_case = TimeCase::Interior;
};

struct OptResult {
  OptStatus status = OptStatus::MaxIterations;
  std::string message;
  ControlField u_opt;
  double tau_opt = 0.0;
  StateTrajectory state;     ///< state at u_opt
  CostBreakdown cost;        ///< at (u_opt, tau_opt)
  std::vector<IterationRecord> history;
  TimeCase time_case = TimeCase::Interior;
  int state_solves = 0;
  double max_mass_residual = 0.0;  ///< over every forward solve of the run
};

/// Pointwise clamp to [u_*, u^*].
ControlField project_control(const ControlField& u, const ControlBounds& bounds);

/// Control stationarity as reported in the history.
double control_stationarity(const ControlField& u, const ControlField& gradient, const ControlBounds& bounds,
                            double b0);

/// Minimises the reduced cost over U_ad x [0, T] by block-coordinate projected
/// gradient: a projected Armijo step in u along the reduced gradient, then
/// projected Armijo steps in tau along D_tau J on the unchanged state.
OptResult optimize(const ModelParams& params, const InitialData& init, const CostSpec& cost,
                   const ControlBounds& bounds, const OptimizerConfig& config, const ControlField& u0, double tau0);

struct TimeOptimalityReport {
  TimeCase time_case = TimeCase::Interior;
  double d_tau = 0.0;
  double lambda = 0.0;
  double cost = 0.0;
  /// Sign condition of the detected case holds within tol (1 + |J|).
  bool satisfied = false;
  /// |tau - (tau* - Lambda / b6)| when b6 > 0 and tau is interior; negative otherwise.
  double fixed_point_residual = -1.0;
};

/// Case by distance to the endpoints (within dt / 2 counts as the endpoint),
/// then checks D_tau J >= 0 at 0, = 0 inside, <= 0 at T.
TimeOptimalityReport classify_time_optimality(const StateTrajectory& state, const ControlField& u, double tau,
                                              const CostSpec& cost, double tol);

}  // namespace chopt
