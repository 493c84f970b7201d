#ifndef YMH_H
#define YMH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum YmhStatus {
  YMH_STATUS_OK = 0,
  YMH_STATUS_NULL_POINTER = 1,
  YMH_STATUS_INVALID_ARGUMENT = 2,
  YMH_STATUS_CONFIG = 3,
  YMH_STATUS_NUMERICAL = 4,
  YMH_STATUS_IO = 5,
  YMH_STATUS_PANIC = 6,
} YmhStatus;

/**
 * Parsed run configuration.
 */
typedef struct YmhConfig YmhConfig;

/**
 * Time integrator holding the geometry and the current state.
 */
typedef struct YmhSimulation YmhSimulation;

/**
 * Diagnostics of one state.
 */
typedef struct YmhDiagnostics {
  double t;
  double kinetic;
  double charge;
  double total;
  double div_inf;
  /**
   * NaN on 3-D grids.
   */
  double enstrophy;
  double charge_l2;
  double charge_l4;
} YmhDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *ymh_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ymh_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from a function of this library and not be freed twice.
 */
void ymh_string_free(char *s);

/**
 * Parses a TOML configuration.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a writable pointer.
 */
enum YmhStatus ymh_config_parse(const char *toml, struct YmhConfig **out);

/**
 * Builds one of the named templates (`taylor-green`, `passive`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum YmhStatus ymh_config_template(const char *name, struct YmhConfig **out);

/**
 * Serializes the configuration to TOML. Free the result with [`ymh_string_free`].
 *
 * # Safety
 * `cfg` must be a live handle and `out` a writable pointer.
 */
enum YmhStatus ymh_config_to_toml(const struct YmhConfig *cfg, char **out);

/**
 * Overrides `time.dt`, `time.steps` and `output.dir`. A non-positive
 * `steps` or a NULL `output_dir` leaves that field unchanged; `dt` is
 * checked like the command-line flag.
 *
 * # Safety
 * `cfg` must be a live handle; `output_dir` is NULL or NUL-terminated.
 */
enum YmhStatus ymh_config_override(struct YmhConfig *cfg,
                                   double dt,
                                   int64_t steps,
                                   const char *output_dir);

/**
 * # Safety
 * `cfg` is NULL or a handle not yet freed.
 */
void ymh_config_free(struct YmhConfig *cfg);

/**
 * Runs the configured simulation to completion, writing its outputs.
 *
 * # Safety
 * `cfg` must be a live handle.
 */
enum YmhStatus ymh_run(const struct YmhConfig *cfg);

/**
 * Creates an integrator at the configured initial state. Nothing is written
 * to disk.
 *
 * # Safety
 * `cfg` must be a live handle and `out` a writable pointer.
 */
enum YmhStatus ymh_simulation_new(const struct YmhConfig *cfg, struct YmhSimulation **out);

/**
 * Advances `steps` RK4 steps. On failure the state of the last accepted
 * step is kept.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum YmhStatus ymh_simulation_step(struct YmhSimulation *sim, size_t steps);

/**
 * # Safety
 * `sim` must be a live handle; NULL gives NaN.
 */
double ymh_simulation_time(const struct YmhSimulation *sim);

/**
 * # Safety
 * `sim` must be a live handle and `out` a writable pointer.
 */
enum YmhStatus ymh_simulation_diagnostics(const struct YmhSimulation *sim,
                                          struct YmhDiagnostics *out);

/**
 * Number of fields (`X0..` then `f0..`) and samples per field (`N^dim`).
 *
 * # Safety
 * `sim` must be a live handle; `fields` and `samples` writable pointers.
 */
enum YmhStatus ymh_simulation_shape(const struct YmhSimulation *sim,
                                    size_t *fields,
                                    size_t *samples);

/**
 * Copies real-space samples of field `index` (row-major, last axis
 * fastest) into `buf`, which must hold `len` doubles with `len` equal to
 * the sample count.
 *
 * # Safety
 * `sim` must be a live handle and `buf` valid for `len` writes.
 */
enum YmhStatus ymh_simulation_field(const struct YmhSimulation *sim,
                                    size_t index,
                                    double *buf,
                                    size_t len);

/**
 * # Safety
 * `sim` is NULL or a handle not yet freed.
 */
void ymh_simulation_free(struct YmhSimulation *sim);

/**
 * Runs the Hopf fibration checks; `passed` receives 1 or 0. `samples` of 0
 * uses the default.
 *
 * # Safety
 * `passed` must be a writable pointer.
 */
enum YmhStatus ymh_verify_hopf(size_t samples, uint64_t seed, int32_t *passed);

/**
 * Runs the su(2) bracket, Jacobi and duality checks on `T^2`; `passed`
 * receives 1 or 0.
 *
 * # Safety
 * `passed` must be a writable pointer.
 */
enum YmhStatus ymh_verify_algebra(size_t resolution,
                                  size_t instances,
                                  uint64_t seed,
                                  int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YMH_H */
