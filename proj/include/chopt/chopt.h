#ifndef CHOPT_CHOPT_H
#define CHOPT_CHOPT_H

/* C interface to the tumour-growth optimal control library.
 *
 * A session owns one experiment: model, grids, initial data, cost, bounds,
 * and a current control. Every call returns a status; on failure the
 * message is available from chopt_last_error() on the same thread until the
 * next failing call. Field arrays are in cell storage order (last axis
 * fastest); control arrays are node-major, (nt + 1) * cells values. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CHOPT_API __declspec(dllexport)
#else
#define CHOPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct chopt_session chopt_session;

typedef enum chopt_status {
  CHOPT_OK = 0,
  CHOPT_INVALID_ARGUMENT = 1,
  CHOPT_CONFIG = 2,
  CHOPT_SOLVER = 3,
  CHOPT_VERIFICATION = 4,
  CHOPT_IO = 5,
  CHOPT_INTERNAL = 6
} chopt_status;

/* Frame components for chopt_session_get_frame. */
enum { CHOPT_MU = 0, CHOPT_PHI = 1, CHOPT_SIGMA = 2 };

CHOPT_API const char* chopt_version(void);
CHOPT_API const char* chopt_last_error(void);
/* Process exit code a CLI should use for a status. */
CHOPT_API int chopt_status_exit_code(chopt_status status);

CHOPT_API chopt_status chopt_session_create_from_file(const char* config_path, chopt_session** out);
/* base_dir resolves relative snapshot paths; may be NULL. */
CHOPT_API chopt_status chopt_session_create_from_json(const char* config_json, const char* base_dir,
                                                      chopt_session** out);
CHOPT_API void chopt_session_destroy(chopt_session* session);

CHOPT_API chopt_status chopt_session_set_seed(chopt_session* session, uint64_t seed);
CHOPT_API chopt_status chopt_session_set_output_dir(chopt_session* session, const char* dir);
CHOPT_API chopt_status chopt_session_set_threads(chopt_session* session, int threads);
/* "simulate", "optimize", "verify" or "all". */
CHOPT_API chopt_status chopt_session_set_pipeline(chopt_session* session, const char* pipeline);

/* Runs the configured pipeline and writes its artifacts. */
CHOPT_API chopt_status chopt_session_run(chopt_session* session);

CHOPT_API chopt_status chopt_session_dims(const chopt_session* session, size_t* cells, int* nt, double* T);

/* Forward solve with the current control; frames are then readable. */
CHOPT_API chopt_status chopt_session_simulate(chopt_session* session);
CHOPT_API chopt_status chopt_session_get_frame(const chopt_session* session, int k, int component, double* out,
                                               size_t len);

CHOPT_API chopt_status chopt_session_set_control(chopt_session* session, const double* values, size_t len);
CHOPT_API chopt_status chopt_session_get_control(const chopt_session* session, double* out, size_t len);

/* Reduced cost, its control gradient and its tau-derivative at the current
 * control (solving the state if needed). */
CHOPT_API chopt_status chopt_session_cost(chopt_session* session, double tau, double* total);
CHOPT_API chopt_status chopt_session_gradient(chopt_session* session, double tau, double* out, size_t len);
CHOPT_API chopt_status chopt_session_time_derivative(chopt_session* session, double tau, double* value,
                                                     double* lambda);

/* Runs the optimizer from the current control; on return the current
 * control is the optimized one. */
CHOPT_API chopt_status chopt_session_optimize(chopt_session* session, double* tau_opt, double* cost);

#ifdef __cplusplus
}
#endif

#endif /* CHOPT_CHOPT_H */
