#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chopt/control.hpp"
#include "chopt/objective.hpp"
#include "chopt/state.hpp"

namespace chopt {

inline constexpr std::uint64_t kDefaultSeed = 20240517;

/// `count` directions with independent standard normal entries on every cell
/// of nodes 0..nt-1 (the last node is zero), each scaled to unit L2(Q) norm.
std::vector<ControlField> random_directions(const Grid& grid, const TimeGrid& time, int count, std::uint64_t seed);

/// Least-squares slope of log(y) against log(x) over the positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct FdGradientOptions {
  int directions = 5;
  std::vector<double> deltas{3.2, 1.6, 0.8, 0.4};  ///< ladder for the slope fit
  double accuracy_delta = 1e-4;
  double accuracy_tol = 1e-6;
  double slope_min = 1.7;
  double slope_max = 2.3;
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;

  bool operator==(const FdGradientOptions&) const = default;
};

struct FdGradientReport {
  std::vector<double> deltas;
  std::vector<double> analytic;                     ///< <grad J, h> per direction
  std::vector<std::vector<double>> ladder_errors;   ///< [direction][delta] relative error
  std::vector<double> slopes;                       ///< per direction
  std::vector<double> accuracy_errors;              ///< per direction, at accuracy_delta
  double accuracy_delta = 0.0;
  double max_accuracy_error = 0.0;
  double min_slope = 0.0;
  double max_slope = 0.0;
  bool passed = false;

  std::string to_text() const;
};

/// Compares the adjoint directional derivative with central differences of
/// the reduced cost along seeded random directions.
FdGradientReport fd_gradient_check(const ModelParams& params, const InitialData& init, const CostSpec& cost,
                                   const ControlField& u, double tau, const FdGradientOptions& options);

struct DualityReport {
  std::vector<double> lhs;  ///< int_{Q_tau} r h
  std::vector<double> rhs;  ///< cost derivative along the linearised state
  std::vector<double> mismatch;
  double max_mismatch = 0.0;
  double tol = 0.0;
  bool passed = false;

  std::string to_text() const;
};

/// Checks int_{Q_tau} r h against the derivative of the tracking, final-time
/// and relaxed terms along (eta, theta, rho) = DS(u) h.
DualityReport duality_check(const ModelParams& params, const StateTrajectory& state, double tau,
                            const CostSpec& cost, int directions, std::uint64_t seed, double tol = 1e-9,
                            int threads = 1);

struct LipschitzSample {
  double magnitude = 0.0;
  int pair = 0;
  double control_distance = 0.0;
  double ratio_phi = 0.0;
  double ratio_sigma = 0.0;
  double ratio_mu = 0.0;
  double ratio_combined = 0.0;  ///< alpha dmu + dphi + dsigma
  double ratio_total = 0.0;     ///< phi + sigma + mu ratios
};

struct LipschitzReport {
  std::vector<LipschitzSample> samples;
  double max_ratio = 0.0;
  double pair_spread = 0.0;       ///< max / min of ratio_total over all samples
  double magnitude_spread = 0.0;  ///< worst max / min of ratio_total across magnitudes for one pair
  double max_pair_spread = 10.0;
  double max_magnitude_spread = 3.0;
  bool passed = false;

  std::string to_text() const;
};

/// Pairs u_i = u + m h_i with seeded unit directions; ratios of sup-in-time
/// L2 state differences to |u_1 - u_2|_{L2(Q)}.
LipschitzReport lipschitz_check(const ModelParams& params, const InitialData& init, const ControlField& u,
                                int pairs, const std::vector<double>& magnitudes, std::uint64_t seed,
                                int threads = 1);

/// max_k |M_k - M_0 - sum_{j<k} dt int u_j| / (1 + |M_0|) with
/// M_k = int (alpha mu_k + phi_k + sigma_k), recomputed from the frames.
double mass_balance_check(const Trajectory& traj, const ControlField& u, const ModelParams& params);

struct MassReport {
  double residual = 0.0;
  double tol = 1e-10;
  bool passed = false;

  std::string to_text() const;
};

struct LinearizationReport {
  std::vector<double> epsilons;
  std::vector<double> errors;  ///< |(S(u + eps h) - S(u)) / eps - DS(u) h|_{L2(Q)}
  double slope = 0.0;
  bool passed = false;

  std::string to_text() const;
};

/// Difference quotients of the forward map against the linearised solve.
LinearizationReport linearization_check(const ModelParams& params, const InitialData& init, const ControlField& u,
                                        const ControlField& h, const std::vector<double>& epsilons);

struct TimeDerivativeReport {
  std::vector<double> taus;
  std::vector<double> analytic;
  std::vector<double> central;
  std::vector<double> rel_errors;
  double delta = 0.0;
  double max_error = 0.0;
  bool passed = false;

  std::string to_text() const;
};

/// D_tau J against (J(tau + delta) - J(tau - delta)) / (2 delta) at each tau.
TimeDerivativeReport time_derivative_check(const StateTrajectory& state, const ControlField& u,
                                           const CostSpec& cost, const std::vector<double>& taus, double delta,
                                           double tol = 1e-2);

}  // namespace chopt
