#include "chopt/verification.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "chopt/adjoint.hpp"
#include "chopt/linearized.hpp"
#include "parallel.hpp"

namespace chopt {

namespace {

// |approx - exact| / |exact|, absolute when exact is zero.
double relative_error(double approx, double exact) {
  const double diff = std::abs(approx - exact);
  return exact == 0.0 ? diff : diff / std::abs(exact);
}

std::ostringstream report_stream() {
  std::ostringstream os;
  os << std::setprecision(6) << std::scientific;
  return os;
}

double sup_l2_distance(const Trajectory& a, const Trajectory& b, int component) {
  double sup = 0.0;
  for (std::size_t k = 0; k < a.frames.size(); ++k)
    sup = std::max(sup, norm_l2(a.frames[k][component] - b.frames[k][component]));
  return sup;
}

}  // namespace

std::vector<ControlField> random_directions(const Grid& grid, const TimeGrid& time, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ControlField> out;
  out.reserve(count);
  for (int d = 0; d < count; ++d) {
    ControlField h = ControlField::constant(grid, time, 0.0);
    for (int k = 0; k < time.nt; ++k)
      for (std::size_t i = 0; i < h.nodes[k].size(); ++i) h.nodes[k][i] = normal(rng);
    h *= 1.0 / control_norm(h);
    out.push_back(std::move(h));
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

FdGradientReport fd_gradient_check(const ModelParams& params, const InitialData& init, const CostSpec& cost,
                                   const ControlField& u, double tau, const FdGradientOptions& options) {
  require(options.directions >= 1, ErrorKind::InvalidArgument, "fd check needs at least one direction");
  const StateTrajectory state = solve_state(params, init, u);
  const AdjointSolution adj = solve_adjoint(params, state, tau, cost);
  const ControlField grad = control_gradient(adj.traj, u, cost.b[0]);
  const auto dirs = random_directions(params.grid, params.time, options.directions, options.seed);

  FdGradientReport rep;
  rep.deltas = options.deltas;
  rep.accuracy_delta = options.accuracy_delta;
  const int nd = options.directions;
  rep.analytic.resize(nd);
  rep.ladder_errors.assign(nd, std::vector<double>(options.deltas.size()));
  rep.slopes.resize(nd);
  rep.accuracy_errors.resize(nd);

  auto central = [&](const ControlField& h, double delta) {
    ControlField up = u, down = u;
    up.axpy(delta, h);
    down.axpy(-delta, h);
    const double jp = reduced_cost(solve_state(params, init, up), up, tau, cost).total;
    const double jm = reduced_cost(solve_state(params, init, down), down, tau, cost).total;
    return (jp - jm) / (2.0 * delta);
  };

  detail::parallel_for(nd, options.threads, [&](int d) {
    const double a = control_inner(grad, dirs[d]);
    rep.analytic[d] = a;
    for (std::size_t j = 0; j < options.deltas.size(); ++j)
      rep.ladder_errors[d][j] = relative_error(central(dirs[d], options.deltas[j]), a);
    rep.slopes[d] = loglog_slope(options.deltas, rep.ladder_errors[d]);
    rep.accuracy_errors[d] = relative_error(central(dirs[d], options.accuracy_delta), a);
  });

  rep.max_accuracy_error = *std::max_element(rep.accuracy_errors.begin(), rep.accuracy_errors.end());
  rep.min_slope = *std::min_element(rep.slopes.begin(), rep.slopes.end());
  rep.max_slope = *std::max_element(rep.slopes.begin(), rep.slopes.end());
  rep.passed = rep.max_accuracy_error <= options.accuracy_tol && rep.min_slope >= options.slope_min &&
               rep.max_slope <= options.slope_max;
  return rep;
}

std::string FdGradientReport::to_text() const {
  auto os = report_stream();
  os << "check: fd_gradient\n";
  os << "directions: " << analytic.size() << "\n";
  for (std::size_t d = 0; d < analytic.size(); ++d) {
    os << "direction " << d << ": analytic " << analytic[d] << ", slope " << slopes[d] << ", error at delta "
       << accuracy_delta << " = " << accuracy_errors[d] << "\n";
    for (std::size_t j = 0; j < deltas.size(); ++j)
      os << "  delta " << deltas[j] << " relative error " << ladder_errors[d][j] << "\n";
  }
  os << "max accuracy error: " << max_accuracy_error << "\n";
  os << "slope range: [" << min_slope << ", " << max_slope << "]\n";
  os << "result: " << (passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

DualityReport duality_check(const ModelParams& params, const StateTrajectory& state, double tau,
                            const CostSpec& cost, int directions, std::uint64_t seed, double tol, int threads) {
  const AdjointSolution adj = solve_adjoint(params, state, tau, cost);
  const auto dirs = random_directions(params.grid, params.time, directions, seed);
  const TimeGrid& time = params.time;
  const auto& b = cost.b;
  const std::vector<double> w = hat_weights(time, 0.0, tau);
  std::vector<double> we;
  const bool relaxed = cost.relaxation && cost.relaxation->gamma != 0.0;
  if (relaxed) we = hat_weights(time, std::max(tau - cost.relaxation->eps, 0.0), tau);
  const Field phi_tau = interpolate_in_time(state.traj, kPhi, tau);

  DualityReport rep;
  rep.tol = tol;
  rep.lhs.resize(directions);
  rep.rhs.resize(directions);
  rep.mismatch.resize(directions);
  detail::parallel_for(directions, threads, [&](int d) {
    const ControlField& h = dirs[d];
    const Trajectory lin = solve_linearized(params, state, h);
    double lhs = 0.0;
    for (int k = 0; k < adj.last_node; ++k) lhs += time.dt() * inner(adj.traj.at(k, kR), h.nodes[k]);
    double rhs = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] == 0.0) continue;
      const int k = static_cast<int>(j);
      if (b[1] != 0.0) rhs += b[1] * w[j] * inner(state.phi(k) - cost.phi_Q[j], lin.at(k, kTheta));
      if (b[3] != 0.0) rhs += b[3] * w[j] * inner(state.sigma(k) - cost.sigma_Q[j], lin.at(k, kRho));
    }
    const Field theta_tau = interpolate_in_time(lin, kTheta, tau);
    if (b[2] != 0.0) rhs += b[2] * inner(phi_tau - cost.phi_Omega, theta_tau);
    if (b[4] != 0.0) rhs += 0.5 * b[4] * integrate(theta_tau);
    if (relaxed) {
      const Relaxation& rel = *cost.relaxation;
      for (std::size_t j = 0; j < we.size(); ++j)
        if (we[j] != 0.0) {
          const int k = static_cast<int>(j);
          rhs += rel.gamma / rel.eps * we[j] * inner(state.sigma(k) - rel.sigma_Omega, lin.at(k, kRho));
        }
    }
    rep.lhs[d] = lhs;
    rep.rhs[d] = rhs;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    rep.mismatch[d] = scale <= 1e-14 ? std::abs(lhs - rhs) : std::abs(lhs - rhs) / scale;
  });
  rep.max_mismatch = directions > 0 ? *std::max_element(rep.mismatch.begin(), rep.mismatch.end()) : 0.0;
  rep.passed = rep.max_mismatch <= tol;
  return rep;
}

std::string DualityReport::to_text() const {
  auto os = report_stream();
  os << "check: duality\n";
  os << "directions: " << lhs.size() << "\n";
  for (std::size_t d = 0; d < lhs.size(); ++d)
    os << "direction " << d << ": int r h = " << lhs[d] << ", cost derivative = " << rhs[d] << ", mismatch "
       << mismatch[d] << "\n";
  os << "max mismatch: " << max_mismatch << " (tolerance " << tol << ")\n";
  os << "result: " << (passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

LipschitzReport lipschitz_check(const ModelParams& params, const InitialData& init, const ControlField& u,
                                int pairs, const std::vector<double>& magnitudes, std::uint64_t seed, int threads) {
  const auto dirs = random_directions(params.grid, params.time, 2 * pairs, seed);
  const int nm = static_cast<int>(magnitudes.size());
  LipschitzReport rep;
  rep.samples.resize(static_cast<std::size_t>(nm) * pairs);
  detail::parallel_for(nm * pairs, threads, [&](int idx) {
    const int mi = idx / pairs;
    const int p = idx % pairs;
    const double m = magnitudes[mi];
    ControlField u1 = u, u2 = u;
    u1.axpy(m, dirs[2 * p]);
    u2.axpy(m, dirs[2 * p + 1]);
    const StateTrajectory s1 = solve_state(params, init, u1);
    const StateTrajectory s2 = solve_state(params, init, u2);
    LipschitzSample smp;
    smp.magnitude = m;
    smp.pair = p;
    smp.control_distance = control_norm(u1 - u2);
    if (smp.control_distance > 0.0) {
      const double dist = smp.control_distance;
      smp.ratio_phi = sup_l2_distance(s1.traj, s2.traj, kPhi) / dist;
      smp.ratio_sigma = sup_l2_distance(s1.traj, s2.traj, kSigma) / dist;
      smp.ratio_mu = sup_l2_distance(s1.traj, s2.traj, kMu) / dist;
      double comb = 0.0;
      for (std::size_t k = 0; k < s1.traj.frames.size(); ++k) {
        Field c = s1.phi(static_cast<int>(k)) - s2.phi(static_cast<int>(k));
        c += s1.sigma(static_cast<int>(k)) - s2.sigma(static_cast<int>(k));
        c.axpy(params.alpha, s1.mu(static_cast<int>(k)) - s2.mu(static_cast<int>(k)));
        comb = std::max(comb, norm_l2(c));
      }
      smp.ratio_combined = comb / dist;
      smp.ratio_total = smp.ratio_phi + smp.ratio_sigma + smp.ratio_mu;
    }
    rep.samples[idx] = smp;
  });

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& s : rep.samples) {
    lo = std::min(lo, s.ratio_total);
    hi = std::max(hi, s.ratio_total);
  }
  rep.max_ratio = hi;
  rep.pair_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  rep.magnitude_spread = 1.0;
  for (int p = 0; p < pairs; ++p) {
    double plo = std::numeric_limits<double>::infinity(), phi = 0.0;
    for (int mi = 0; mi < nm; ++mi) {
      const double r = rep.samples[static_cast<std::size_t>(mi) * pairs + p].ratio_total;
      plo = std::min(plo, r);
      phi = std::max(phi, r);
    }
    rep.magnitude_spread =
        std::max(rep.magnitude_spread, plo > 0.0 ? phi / plo : std::numeric_limits<double>::infinity());
  }
  rep.passed = rep.pair_spread <= rep.max_pair_spread && rep.magnitude_spread <= rep.max_magnitude_spread &&
               std::isfinite(rep.max_ratio);
  return rep;
}

std::string LipschitzReport::to_text() const {
  auto os = report_stream();
  os << "check: lipschitz\n";
  for (const auto& s : samples)
    os << "magnitude " << s.magnitude << " pair " << s.pair << ": |du| " << s.control_distance << ", phi "
       << s.ratio_phi << ", sigma " << s.ratio_sigma << ", mu " << s.ratio_mu << ", combined " << s.ratio_combined
       << ", total " << s.ratio_total << "\n";
  os << "max ratio: " << max_ratio << "\n";
  os << "spread over all samples: " << pair_spread << " (limit " << max_pair_spread << ")\n";
  os << "spread across magnitudes: " << magnitude_spread << " (limit " << max_magnitude_spread << ")\n";
  os << "result: " << (passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

double mass_balance_check(const Trajectory& traj, const ControlField& u, const ModelParams& params) {
  require(u.time == traj.time && u.node_count() >= traj.frames.size(), ErrorKind::ShapeMismatch,
          "control does not match the trajectory");
  const double m0 = conserved_mass(traj.frames[0], params.alpha);
  const double dt = traj.time.dt();
  double drift = 0.0;
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.frames.size(); ++k) {
    drift += dt * integrate(u.nodes[k - 1]);
    const double mk = conserved_mass(traj.frames[k], params.alpha);
    worst = std::max(worst, std::abs(mk - m0 - drift) / (1.0 + std::abs(m0)));
  }
  return worst;
}

std::string MassReport::to_text() const {
  auto os = report_stream();
  os << "check: mass_balance\n";
  os << "residual: " << residual << " (tolerance " << tol << ")\n";
  os << "result: " << (passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

LinearizationReport linearization_check(const ModelParams& params, const InitialData& init, const ControlField& u,
                                        const ControlField& h, const std::vector<double>& epsilons) {
  const StateTrajectory base = solve_state(params, init, u);
  const Trajectory lin = solve_linearized(params, base, h);
  const double dt = params.time.dt();
  LinearizationReport rep;
  rep.epsilons = epsilons;
  for (double eps : epsilons) {
    ControlField up = u;
    up.axpy(eps, h);
    const StateTrajectory s = solve_state(params, init, up);
    double sq = 0.0;
    for (std::size_t k = 1; k < s.traj.frames.size(); ++k)
      for (int c = 0; c < 3; ++c) {
        Field q = s.traj.frames[k][c] - base.traj.frames[k][c];
        q *= 1.0 / eps;
        q -= lin.frames[k][c];
        sq += dt * inner(q, q);
      }
    rep.errors.push_back(std::sqrt(sq));
  }
  rep.slope = loglog_slope(epsilons, rep.errors);
  rep.passed = std::abs(rep.slope - 1.0) <= 0.3;
  return rep;
}

std::string LinearizationReport::to_text() const {
  auto os = report_stream();
  os << "check: linearization\n";
  for (std::size_t i = 0; i < epsilons.size(); ++i)
    os << "eps " << epsilons[i] << ": error " << errors[i] << "\n";
  os << "slope: " << slope << "\n";
  os << "result: " << (passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

TimeDerivativeReport time_derivative_check(const StateTrajectory& state, const ControlField& u,
                                           const CostSpec& cost, const std::vector<double>& taus, double delta,
                                           double tol) {
  TimeDerivativeReport rep;
  rep.taus = taus;
  rep.delta = delta;
  for (double tau : taus) {
    const double a = time_derivative(state, tau, cost).value;
    const double c = (reduced_cost(state, u, tau + delta, cost).total - reduced_cost(state, u, tau - delta, cost).total) /
                     (2.0 * delta);
    rep.analytic.push_back(a);
    rep.central.push_back(c);
    rep.rel_errors.push_back(relative_error(c, a));
  }
  rep.max_error = rep.rel_errors.empty() ? 0.0 : *std::max_element(rep.rel_errors.begin(), rep.rel_errors.end());
  rep.passed = rep.max_error <= tol;
  return rep;
}

std::string TimeDerivativeReport::to_text() const {
  auto os = report_stream();
  os << "check: time_derivative\n";
  for (std::size_t i = 0; i < taus.size(); ++i)
    os << "tau " << taus[i] << ": analytic " << analytic[i] << ", central " << central[i] << ", relative error "
       << rel_errors[i] << "\n";
  os << "max relative error: " << max_error << " (delta " << delta << ")\n";
  os << "result: " << (passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace chopt
