#include "chopt/chopt.h"

#include <cmath>
#include <cstring>
#include <optional>
#include <string>

#include "chopt/adjoint.hpp"
#include "chopt/config.hpp"
#include "chopt/experiment.hpp"
#include "chopt/objective.hpp"
#include "chopt/optimizer.hpp"

struct chopt_session {
  chopt::ExperimentConfig config;
  chopt::Problem problem;
  chopt::ControlField control;
  std::optional<chopt::StateTrajectory> state;  // valid for `control`
};

namespace {

thread_local std::string g_last_error;

chopt_status status_for(chopt::ErrorKind kind) {
  using chopt::ErrorKind;
  switch (kind) {
    case ErrorKind::Config: return CHOPT_CONFIG;
    case ErrorKind::Domain:
    case ErrorKind::Dimension:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::InvalidArgument: return CHOPT_INVALID_ARGUMENT;
    case ErrorKind::NewtonDivergence:
    case ErrorKind::SeparationViolation:
    case ErrorKind::NanDetected:
    case ErrorKind::LineSearchFailure: return CHOPT_SOLVER;
    case ErrorKind::Io: return CHOPT_IO;
  }
  return CHOPT_INTERNAL;
}

chopt_status set_error(chopt_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class Fn>
chopt_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const chopt::Error& e) {
    return set_error(status_for(e.kind()), std::string(chopt::to_string(e.kind())) + ": " + e.what());
  } catch (const std::exception& e) {
    return set_error(CHOPT_INTERNAL, std::string("internal error: ") + e.what());
  } catch (...) {
    return set_error(CHOPT_INTERNAL, "internal error");
  }
}

chopt_status create(chopt::ExperimentConfig cfg, chopt_session** out) {
  auto* s = new chopt_session;
  try {
    s->problem = chopt::build_problem(cfg);
  } catch (...) {
    delete s;
    throw;
  }
  s->config = std::move(cfg);
  s->control = s->problem.u0;
  *out = s;
  return CHOPT_OK;
}

const chopt::StateTrajectory& ensure_state(chopt_session* s) {
  if (!s->state) s->state = chopt::solve_state(s->problem.params, s->problem.init, s->control);
  return *s->state;
}

std::size_t cells(const chopt_session* s) { return s->problem.params.grid.cell_count(); }
std::size_t control_len(const chopt_session* s) {
  return cells(s) * static_cast<std::size_t>(s->problem.params.time.node_count());
}

void copy_control(const chopt::ControlField& u, double* out) {
  for (std::size_t k = 0; k < u.nodes.size(); ++k)
    std::memcpy(out + k * u.nodes[k].size(), u.nodes[k].data(), u.nodes[k].size() * sizeof(double));
}

}  // namespace

extern "C" {

const char* chopt_version(void) { return chopt::library_version(); }

const char* chopt_last_error(void) { return g_last_error.c_str(); }

int chopt_status_exit_code(chopt_status status) {
  switch (status) {
    case CHOPT_OK: return 0;
    case CHOPT_INVALID_ARGUMENT:
    case CHOPT_CONFIG: return 2;
    case CHOPT_SOLVER: return 3;
    case CHOPT_VERIFICATION: return 4;
    case CHOPT_IO: return 5;
    case CHOPT_INTERNAL: return 6;
  }
  return 6;
}

chopt_status chopt_session_create_from_file(const char* config_path, chopt_session** out) {
  if (!config_path || !out) return set_error(CHOPT_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return create(chopt::load_config(config_path), out); });
}

chopt_status chopt_session_create_from_json(const char* config_json, const char* base_dir, chopt_session** out) {
  if (!config_json || !out) return set_error(CHOPT_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return create(chopt::parse_config(config_json, base_dir ? base_dir : ""), out); });
}

void chopt_session_destroy(chopt_session* session) { delete session; }

chopt_status chopt_session_set_seed(chopt_session* session, uint64_t seed) {
  if (!session) return set_error(CHOPT_INVALID_ARGUMENT, "null session");
  session->config.seed = seed;
  return CHOPT_OK;
}

chopt_status chopt_session_set_output_dir(chopt_session* session, const char* dir) {
  if (!session || !dir) return set_error(CHOPT_INVALID_ARGUMENT, "null argument");
  session->config.output_dir = dir;
  return CHOPT_OK;
}

chopt_status chopt_session_set_threads(chopt_session* session, int threads) {
  if (!session) return set_error(CHOPT_INVALID_ARGUMENT, "null session");
  if (threads < 1) return set_error(CHOPT_INVALID_ARGUMENT, "threads must be >= 1");
  session->config.threads = threads;
  return CHOPT_OK;
}

chopt_status chopt_session_set_pipeline(chopt_session* session, const char* pipeline) {
  if (!session || !pipeline) return set_error(CHOPT_INVALID_ARGUMENT, "null argument");
  const std::string p = pipeline;
  if (p == "simulate") session->config.pipeline = chopt::Pipeline::Simulate;
  else if (p == "optimize") session->config.pipeline = chopt::Pipeline::Optimize;
  else if (p == "verify") session->config.pipeline = chopt::Pipeline::Verify;
  else if (p == "all") session->config.pipeline = chopt::Pipeline::All;
  else return set_error(CHOPT_INVALID_ARGUMENT, "unknown pipeline '" + p + "'");
  return CHOPT_OK;
}

chopt_status chopt_session_run(chopt_session* session) {
  if (!session) return set_error(CHOPT_INVALID_ARGUMENT, "null session");
  return guarded([&] {
    const chopt::RunOutcome r = chopt::run_experiment(session->config);
    switch (r.code) {
      case chopt::ExitCode::Ok: return CHOPT_OK;
      case chopt::ExitCode::Config: return set_error(CHOPT_CONFIG, r.message);
      case chopt::ExitCode::Solver: return set_error(CHOPT_SOLVER, r.message);
      case chopt::ExitCode::Verification: return set_error(CHOPT_VERIFICATION, r.message);
      case chopt::ExitCode::Io: return set_error(CHOPT_IO, r.message);
      case chopt::ExitCode::Internal: break;
    }
    return set_error(CHOPT_INTERNAL, r.message);
  });
}

chopt_status chopt_session_dims(const chopt_session* session, size_t* n_cells, int* nt, double* T) {
  if (!session) return set_error(CHOPT_INVALID_ARGUMENT, "null session");
  if (n_cells) *n_cells = cells(session);
  if (nt) *nt = session->problem.params.time.nt;
  if (T) *T = session->problem.params.time.T;
  return CHOPT_OK;
}

chopt_status chopt_session_simulate(chopt_session* session) {
  if (!session) return set_error(CHOPT_INVALID_ARGUMENT, "null session");
  return guarded([&] {
    session->state.reset();
    ensure_state(session);
    return CHOPT_OK;
  });
}

chopt_status chopt_session_get_frame(const chopt_session* session, int k, int component, double* out, size_t len) {
  if (!session || !out) return set_error(CHOPT_INVALID_ARGUMENT, "null argument");
  if (!session->state) return set_error(CHOPT_INVALID_ARGUMENT, "no state: call chopt_session_simulate first");
  if (k < 0 || k > session->problem.params.time.nt || component < 0 || component > 2)
    return set_error(CHOPT_INVALID_ARGUMENT, "frame index or component out of range");
  if (len != cells(session)) return set_error(CHOPT_INVALID_ARGUMENT, "buffer length must equal the cell count");
  const chopt::Field& f = session->state->traj.at(k, component);
  std::memcpy(out, f.data(), len * sizeof(double));
  return CHOPT_OK;
}

chopt_status chopt_session_set_control(chopt_session* session, const double* values, size_t len) {
  if (!session || !values) return set_error(CHOPT_INVALID_ARGUMENT, "null argument");
  if (len != control_len(session))
    return set_error(CHOPT_INVALID_ARGUMENT, "control length must be (nt + 1) * cells");
  for (size_t i = 0; i < len; ++i)
    if (!std::isfinite(values[i])) return set_error(CHOPT_INVALID_ARGUMENT, "control values must be finite");
  const std::size_t n = cells(session);
  for (std::size_t k = 0; k < session->control.nodes.size(); ++k)
    std::memcpy(session->control.nodes[k].data(), values + k * n, n * sizeof(double));
  session->state.reset();
  return CHOPT_OK;
}

chopt_status chopt_session_get_control(const chopt_session* session, double* out, size_t len) {
  if (!session || !out) return set_error(CHOPT_INVALID_ARGUMENT, "null argument");
  if (len != control_len(session))
    return set_error(CHOPT_INVALID_ARGUMENT, "control length must be (nt + 1) * cells");
  copy_control(session->control, out);
  return CHOPT_OK;
}

chopt_status chopt_session_cost(chopt_session* session, double tau, double* total) {
  if (!session || !total) return set_error(CHOPT_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *total = chopt::reduced_cost(ensure_state(session), session->control, tau, session->problem.cost).total;
    return CHOPT_OK;
  });
}

chopt_status chopt_session_gradient(chopt_session* session, double tau, double* out, size_t len) {
  if (!session || !out) return set_error(CHOPT_INVALID_ARGUMENT, "null argument");
  if (len != control_len(session))
    return set_error(CHOPT_INVALID_ARGUMENT, "gradient length must be (nt + 1) * cells");
  return guarded([&] {
    const auto& p = session->problem;
    const auto adj = chopt::solve_adjoint(p.params, ensure_state(session), tau, p.cost);
    copy_control(chopt::control_gradient(adj.traj, session->control, p.cost.b[0]), out);
    return CHOPT_OK;
  });
}

chopt_status chopt_session_time_derivative(chopt_session* session, double tau, double* value, double* lambda) {
  if (!session) return set_error(CHOPT_INVALID_ARGUMENT, "null session");
  return guarded([&] {
    const auto d = chopt::time_derivative(ensure_state(session), tau, session->problem.cost);
    if (value) *value = d.value;
    if (lambda) *lambda = d.lambda;
    return CHOPT_OK;
  });
}

chopt_status chopt_session_optimize(chopt_session* session, double* tau_opt, double* cost) {
  if (!session) return set_error(CHOPT_INVALID_ARGUMENT, "null session");
  return guarded([&] {
    const auto& p = session->problem;
    chopt::OptResult r =
        chopt::optimize(p.params, p.init, p.cost, p.bounds, session->config.optimizer, session->control, p.tau0);
    if (r.status == chopt::OptStatus::LineSearchFailure) return set_error(CHOPT_SOLVER, r.message);
    session->control = std::move(r.u_opt);
    session->state = std::move(r.state);
    if (tau_opt) *tau_opt = r.tau_opt;
    if (cost) *cost = r.cost.total;
    return CHOPT_OK;
  });
}

}  // extern "C"
