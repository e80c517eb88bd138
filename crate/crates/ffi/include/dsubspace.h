#ifndef DSUBSPACE_H
#define DSUBSPACE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_INVALID_ARGUMENT = 1,
  DS_STATUS_UNKNOWN_KEY = 2,
  DS_STATUS_PARSE = 3,
  DS_STATUS_IO = 4,
  DS_STATUS_NULL_POINTER = 5,
  DS_STATUS_INTERNAL = 6,
} DsStatus;

typedef enum DsTermination {
  DS_TERMINATION_STEP_SIZE_FLOOR = 0,
  DS_TERMINATION_BUDGET = 1,
  DS_TERMINATION_MAX_ITERATIONS = 2,
} DsTermination;

/**
 * Solver settings.
 */
typedef struct DsConfig DsConfig;

/**
 * An objective with its starting point.
 */
typedef struct DsProblem DsProblem;

/**
 * Result of one run.
 */
typedef struct DsRecord DsRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ds_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ds_version(void);

/**
 * New configuration with default settings. Free with [`ds_config_free`].
 */
struct DsConfig *ds_config_new(void);

/**
 * # Safety
 * `config` must come from [`ds_config_new`] and not be used afterwards.
 */
void ds_config_free(struct DsConfig *config);

/**
 * Sets an option by name, e.g. `("sketch", "gaussian:r=1")`, `("budget",
 * "5050")`. Names match the command-line flags of the `solve` command.
 *
 * # Safety
 * `config` must be a live handle; `key` and `value` NUL-terminated strings.
 */
enum DsStatus ds_config_set(struct DsConfig *config, const char *key, const char *value);

/**
 * Builds a registered problem such as `"quad:n=100,cond=1e4"`. `seed` keys
 * random instance data.
 *
 * # Safety
 * `key` must be NUL-terminated; `out` must be writable.
 */
enum DsStatus ds_problem_from_key(const char *key, uint64_t seed, struct DsProblem **out);

/**
 * Wraps a C objective `f(user_data, x, n)`. `x0` is copied. The callback and `user_data` must
 * stay valid for the problem's lifetime and must be safe to call from the
 * thread running the solver.
 *
 * # Safety
 * `x0` must point to `n` doubles; `out` must be writable.
 */
enum DsStatus ds_problem_from_callback(const char *name,
                                       size_t n,
                                       const double *x0,
                                       double (*objective)(void *user_data,
                                                           const double *x,
                                                           size_t n),
                                       void *user_data,
                                       struct DsProblem **out);

/**
 * # Safety
 * `problem` must come from a `ds_problem_*` constructor and not be used
 * afterwards.
 */
void ds_problem_free(struct DsProblem *problem);

/**
 * Dimension of the problem, or 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t ds_problem_dim(const struct DsProblem *problem);

/**
 * Evaluates the objective at `x` (length `n`) without counting.
 *
 * # Safety
 * `problem` must be live, `x` must point to `n` doubles, `value` writable.
 */
enum DsStatus ds_problem_eval(const struct DsProblem *problem,
                              const double *x,
                              size_t n,
                              double *value);

/**
 * Runs the configured solver. Random draws come from a stream keyed by
 * `seed` and the problem name, as in the command-line tool.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum DsStatus ds_solve(const struct DsProblem *problem,
                       const struct DsConfig *config,
                       uint64_t seed,
                       struct DsRecord **out);

/**
 * # Safety
 * `record` must come from [`ds_solve`] and not be used afterwards.
 */
void ds_record_free(struct DsRecord *record);

/**
 * Final objective value, NaN for a null handle.
 *
 * # Safety
 * `record` must be null or live.
 */
double ds_record_final_f(const struct DsRecord *record);

/**
 * # Safety
 * `record` must be null or live.
 */
uint64_t ds_record_total_evals(const struct DsRecord *record);

/**
 * Number of history rows (iterations + 1).
 *
 * # Safety
 * `record` must be null or live.
 */
size_t ds_record_history_len(const struct DsRecord *record);

/**
 * Copies history row `i`. Any output pointer may be null.
 *
 * # Safety
 * `record` must be live; non-null outputs must be writable.
 */
enum DsStatus ds_record_history_row(const struct DsRecord *record,
                                    size_t i,
                                    uint64_t *k,
                                    double *alpha,
                                    double *f,
                                    uint64_t *evals);

/**
 * Copies the final point into `x`, which must hold `n` = dimension doubles.
 *
 * # Safety
 * `record` must be live; `x` must point to `n` writable doubles.
 */
enum DsStatus ds_record_final_x(const struct DsRecord *record, double *x, size_t n);

/**
 * # Safety
 * `record` and `out` must be live/writable.
 */
enum DsStatus ds_record_termination(const struct DsRecord *record, enum DsTermination *out);

/**
 * `μ = log_{γ_inc}(1/γ_dec)` and `p₀ = max(1/(1+μ), μ/(1+μ))`.
 *
 * # Safety
 * `mu` and `p0` must be writable.
 */
enum DsStatus ds_diagnostics_mu_p0(double gamma_inc, double gamma_dec, double *mu, double *p0);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSUBSPACE_H */
