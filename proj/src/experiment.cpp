#include "chopt/experiment.hpp"

#include <json.hpp>

#include "chopt/adjoint.hpp"
#include "chopt/io.hpp"
#include "chopt/optimizer.hpp"
#include "chopt/verification.hpp"

#ifndef CHOPT_VERSION
#define CHOPT_VERSION "unknown"
#endif

namespace chopt {

namespace fs = std::filesystem;
using nlohmann::json;

const char* library_version() { return CHOPT_VERSION; }

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Domain:
    case ErrorKind::Dimension:
    case ErrorKind::ShapeMismatch: return ExitCode::Config;
    case ErrorKind::NewtonDivergence:
    case ErrorKind::SeparationViolation:
    case ErrorKind::NanDetected:
    case ErrorKind::LineSearchFailure: return ExitCode::Solver;
    case ErrorKind::Io: return ExitCode::Io;
  }
  return ExitCode::Internal;
}

namespace {

json breakdown_json(const CostBreakdown& c) {
  return {{"tracking_Q", c.tracking_Q},         {"tracking_Omega", c.tracking_Omega},
          {"nutrient_Q", c.nutrient_Q},         {"tumour_mass", c.tumour_mass},
          {"linear_time", c.linear_time},       {"quadratic_time", c.quadratic_time},
          {"control_energy", c.control_energy}, {"relaxed_term", c.relaxed_term},
          {"total", c.total}};
}

// JSON cannot hold infinities; separation is infinite for regular potentials.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json simulate_stage(const Problem& p, const fs::path& dir) {
  const StateTrajectory state = solve_state(p.params, p.init, p.u0);
  write_trajectory(dir / "state.json", state.traj, {"mu", "phi", "sigma"});
  write_diagnostics_csv(dir / "diagnostics.csv", state);
  const SeparationReport sep = separation_report(state.traj, p.params.potential);
  return {{"cost_at_tau0", breakdown_json(reduced_cost(state, p.u0, p.tau0, p.cost))},
          {"tau0", p.tau0},
          {"max_mass_residual", state.max_mass_residual()},
          {"mass_balance", mass_balance_check(state.traj, p.u0, p.params)},
          {"delta_sep", finite_or_null(sep.delta_sep)},
          {"delta_sep_frame", sep.argmin_frame}};
}

struct StageResult {
  json summary;
  ExitCode code = ExitCode::Ok;
  std::string message;
};

StageResult optimize_stage(const ExperimentConfig& c, const Problem& p, const fs::path& dir) {
  const OptResult res = optimize(p.params, p.init, p.cost, p.bounds, c.optimizer, p.u0, p.tau0);
  write_history_csv(dir / "history.csv", res.history);
  write_breakdown_csv(dir / "breakdown.csv", res.history);
  write_control(dir / "control.json", res.u_opt);
  write_trajectory(dir / "state.json", res.state.traj, {"mu", "phi", "sigma"});
  const AdjointSolution adj = solve_adjoint(p.params, res.state, res.tau_opt, p.cost);
  write_trajectory(dir / "adjoint.json", adj.traj, {"q", "p", "r"});
  write_adjoint_csv(dir / "adjoint_diagnostics.csv", adj.step_residuals, adj.snap_offset);

  const ControlField grad = control_gradient(adj.traj, res.u_opt, p.cost.b[0]);
  const TimeOptimalityReport top =
      classify_time_optimality(res.state, res.u_opt, res.tau_opt, p.cost, c.optimizer.grad_tol);
  StageResult out;
  out.summary = {{"status", to_string(res.status)},
                 {"message", res.message},
                 {"iterations", res.history.empty() ? 0 : res.history.back().iteration},
                 {"state_solves", res.state_solves},
                 {"tau_opt", res.tau_opt},
                 {"cost", breakdown_json(res.cost)},
                 {"control_stationarity", control_stationarity(res.u_opt, grad, p.bounds, p.cost.b[0])},
                 {"time_case", to_string(top.time_case)},
                 {"d_tau", top.d_tau},
                 {"lambda", top.lambda},
                 {"time_condition_satisfied", top.satisfied},
                 {"fixed_point_residual", top.fixed_point_residual >= 0.0 ? json(top.fixed_point_residual) : json(nullptr)},
                 {"max_mass_residual", res.max_mass_residual},
                 {"adjoint_snap_offset", adj.snap_offset}};
  if (res.status == OptStatus::LineSearchFailure) {
    out.code = ExitCode::Solver;
    out.message = "optimizer: " + res.message;
  }
  return out;
}

StageResult verify_stage(const ExperimentConfig& c, const Problem& p, const fs::path& dir) {
  const VerificationSettings& v = c.verification;
  const double tau = v.tau ? *v.tau : p.tau0;
  const StateTrajectory state = solve_state(p.params, p.init, p.u0);
  json checks = json::object();
  bool all = true;

  if (v.fd_gradient) {
    FdGradientOptions fo = v.fd;
    fo.seed = c.seed;
    fo.threads = c.threads;
    const FdGradientReport r = fd_gradient_check(p.params, p.init, p.cost, p.u0, tau, fo);
    write_text(dir / "fd_gradient.txt", r.to_text());
    checks["fd_gradient"] = {{"passed", r.passed},
                             {"max_accuracy_error", r.max_accuracy_error},
                             {"min_slope", r.min_slope},
                             {"max_slope", r.max_slope}};
    all = all && r.passed;
  }
  if (v.duality) {
    const DualityReport r = duality_check(p.params, state, tau, p.cost, v.duality_directions, c.seed + 1,
                                          v.duality_tol, c.threads);
    write_text(dir / "duality.txt", r.to_text());
    checks["duality"] = {{"passed", r.passed}, {"max_mismatch", r.max_mismatch}};
    all = all && r.passed;
  }
  if (v.lipschitz) {
    const LipschitzReport r =
        lipschitz_check(p.params, p.init, p.u0, v.lipschitz_pairs, v.lipschitz_magnitudes, c.seed + 2, c.threads);
    write_text(dir / "lipschitz.txt", r.to_text());
    checks["lipschitz"] = {{"passed", r.passed},
                           {"max_ratio", r.max_ratio},
                           {"pair_spread", r.pair_spread},
                           {"magnitude_spread", r.magnitude_spread}};
    all = all && r.passed;
  }
  if (v.mass_balance) {
    MassReport r;
    r.tol = v.mass_tol;
    r.residual = mass_balance_check(state.traj, p.u0, p.params);
    r.passed = r.residual <= r.tol;
    write_text(dir / "mass_balance.txt", r.to_text());
    checks["mass_balance"] = {{"passed", r.passed}, {"residual", r.residual}};
    all = all && r.passed;
  }
  StageResult out;
  out.summary = {{"tau", tau}, {"passed", all}, {"checks", checks}};
  write_text(dir / "verification_summary.json", out.summary.dump(2) + "\n");
  if (!all) {
    out.code = ExitCode::Verification;
    std::string failed;
    for (auto it = checks.begin(); it != checks.end(); ++it)
      if (!it.value().at("passed").get<bool>()) failed += (failed.empty() ? "" : ", ") + it.key();
    out.message = "verification failed: " + failed;
  }
  return out;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config) {
  RunOutcome outcome;
  outcome.output_dir = config.output_dir.empty() ? fs::path("chopt-out") : fs::path(config.output_dir);
  const fs::path& out = outcome.output_dir;
  json summary;
  summary["version"] = library_version();
  summary["pipeline"] = to_string(config.pipeline);
  summary["config"] = json::parse(config_to_json(config));
  json results = json::object();

  try {
    const Problem p = build_problem(config);
    const bool sim = config.pipeline == Pipeline::Simulate || config.pipeline == Pipeline::All;
    const bool opt = config.pipeline == Pipeline::Optimize || config.pipeline == Pipeline::All;
    const bool ver = config.pipeline == Pipeline::Verify || config.pipeline == Pipeline::All;
    if (sim) results["simulate"] = simulate_stage(p, out / "simulate");
    if (opt) {
      StageResult r = optimize_stage(config, p, out / "optimize");
      results["optimize"] = r.summary;
      if (r.code != ExitCode::Ok) {
        outcome.code = r.code;
        outcome.message = r.message;
      }
    }
    if (ver && outcome.code == ExitCode::Ok) {
      StageResult r = verify_stage(config, p, out / "verify");
      results["verify"] = r.summary;
      if (r.code != ExitCode::Ok) {
        outcome.code = r.code;
        outcome.message = r.message;
      }
    }
  } catch (const Error& e) {
    outcome.code = exit_code_for(e.kind());
    outcome.message = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    outcome.code = ExitCode::Internal;
    outcome.message = std::string("internal error: ") + e.what();
  }

  summary["results"] = results;
  summary["exit_code"] = static_cast<int>(outcome.code);
  summary["message"] = outcome.message.empty() ? "ok" : outcome.message;
  try {
    write_text(out / "run-summary.json", summary.dump(2) + "\n");
  } catch (const Error& e) {
    if (outcome.code == ExitCode::Ok) {
      outcome.code = ExitCode::Io;
      outcome.message = e.what();
    }
  }
  return outcome;
}

}  // namespace chopt
