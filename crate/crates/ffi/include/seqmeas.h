#ifndef SEQMEAS_H
#define SEQMEAS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_POINTER = 1,
  SM_STATUS_INVALID_UTF8 = 2,
  SM_STATUS_PARSE = 3,
  SM_STATUS_VALIDATION = 4,
  SM_STATUS_DIMENSION = 5,
  SM_STATUS_BUFFER_TOO_SMALL = 6,
  SM_STATUS_NUMERICAL = 7,
  SM_STATUS_PANIC = 8,
} SmStatus;

typedef enum SmConstruction {
  SM_CONSTRUCTION_TRINE = 0,
  SM_CONSTRUCTION_DUAL_BASIS = 1,
} SmConstruction;

typedef enum SmMode {
  SM_MODE_FULL = 0,
  SM_MODE_FIXED_STATE = 1,
  SM_MODE_FIXED_ALICE = 2,
  SM_MODE_PROJECTIVE_ALICE = 3,
} SmMode;

/*
 Opaque scenario handle.
 */
typedef struct SmScenario SmScenario;

typedef struct SmShape {
  size_t alice_dim;
  size_t bob_dim;
  size_t n_alice;
  size_t n_bob;
} SmShape;

typedef struct SmWitness {
  double value;
  double nsit_residual;
} SmWitness;

/*
 Optimizer settings. `fixed` may be NULL unless `mode` is one of the
 fixed modes; `threads == 0` uses every core.
 */
typedef struct SmOptConfig {
  size_t alice_dim;
  size_t bob_dim;
  size_t n_alice_outcomes;
  size_t n_bob_outcomes;
  size_t restarts;
  size_t max_iters;
  uint64_t seed;
  double tol;
  enum SmMode mode;
  const struct SmScenario *fixed;
  size_t threads;
} SmOptConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread, or an empty string.
 The pointer stays valid until the next failing call on the same thread.
 */
const char *sm_last_error_message(void);

/*
 Parses and validates a JSON scenario document.

 # Safety
 `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SmStatus sm_scenario_from_json(const char *json, double tol, struct SmScenario **out);

/*
 Builds one of the explicit violating scenarios.

 # Safety
 `out` must be a writable pointer.
 */
enum SmStatus sm_scenario_construction(enum SmConstruction kind, size_t d, struct SmScenario **out);

/*
 Releases a scenario handle. NULL is ignored.

 # Safety
 `scenario` must come from this library and not have been freed.
 */
void sm_scenario_free(struct SmScenario *scenario);

/*
 Serializes a scenario to a JSON document; free it with `sm_string_free`.

 # Safety
 `scenario` must be a live handle and `out` a writable pointer.
 */
enum SmStatus sm_scenario_to_json(const struct SmScenario *scenario, char **out);

/*
 Frees a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from `sm_scenario_to_json` and not have been freed.
 */
void sm_string_free(char *s);

/*
 # Safety
 `scenario` must be a live handle and `out` a writable pointer.
 */
enum SmStatus sm_scenario_shape(const struct SmScenario *scenario, struct SmShape *out);

/*
 Witness value and NSIT residual.

 # Safety
 `scenario` must be a live handle and `out` a writable pointer.
 */
enum SmStatus sm_witness(const struct SmScenario *scenario, struct SmWitness *out);

/*
 `p(a0, a1, b)` row-major over `(a0, a1, b)`; needs `n_alice² · n_bob` doubles.

 # Safety
 `scenario` must be a live handle; `buf` must hold `len` doubles;
 `written` may be NULL.
 */
enum SmStatus sm_joint_table(const struct SmScenario *scenario,
                             double *buf,
                             size_t len,
                             size_t *written);

/*
 `p(a1, b)` row-major over `(a1, b)`; needs `n_alice · n_bob` doubles.

 # Safety
 Same contract as `sm_joint_table`.
 */
enum SmStatus sm_single_table(const struct SmScenario *scenario,
                              double *buf,
                              size_t len,
                              size_t *written);

/*
 Residuals `Σ_a0 p(a0, a1, b) − p(a1, b)` row-major over `(a1, b)`.

 # Safety
 Same contract as `sm_joint_table`.
 */
enum SmStatus sm_residuals(const struct SmScenario *scenario,
                           double *buf,
                           size_t len,
                           size_t *written);

/*
 `½(1 − 1/d)`.
 */
double sm_dual_basis_witness_value(size_t d);

/*
 Optimizer defaults for the given shape.
 */
struct SmOptConfig sm_opt_config_default(size_t alice_dim,
                                         size_t bob_dim,
                                         size_t n_alice_outcomes,
                                         size_t n_bob_outcomes);

/*
 Maximizes the witness; the best scenario is returned as a new handle.

 # Safety
 `config` must be readable, `config->fixed` NULL or a live handle, and
 `best_value`, `best` writable.
 */
enum SmStatus sm_optimize(const struct SmOptConfig *config,
                          double *best_value,
                          struct SmScenario **best);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEQMEAS_H */
