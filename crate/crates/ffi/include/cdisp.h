#ifndef CDISP_H
#define CDISP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CdispStatus {
  CDISP_STATUS_OK = 0,
  CDISP_STATUS_NULL_POINTER = 1,
  CDISP_STATUS_INVALID_ARGUMENT = 2,
  CDISP_STATUS_INVALID_CONFIG = 3,
  CDISP_STATUS_NUMERICAL = 4,
  CDISP_STATUS_IO = 5,
  CDISP_STATUS_BUFFER_TOO_SMALL = 6,
  CDISP_STATUS_PANIC = 7,
} CdispStatus;

/**
 * Opaque experiment handle.
 */
typedef struct CdispExperiment CdispExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on the calling thread; empty after a
 * success. The pointer stays valid until the next call on this thread.
 */
const char *cdisp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cdisp_version(void);

/**
 * Writes J_order(x) to `out`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one double.
 */
enum CdispStatus cdisp_bessel_j(int order, double x, double *out);

/**
 * Creates an experiment from a built-in preset (`fig2`, `fig3`,
 * `gate-0948`, `gate-07844`, `cat-1step`, `cat-2step`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum CdispStatus cdisp_experiment_from_preset(const char *name, struct CdispExperiment **out);

/**
 * Creates an experiment from TOML config text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum CdispStatus cdisp_experiment_from_toml(const char *toml, struct CdispExperiment **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `experiment` must be null or a handle not yet freed.
 */
void cdisp_experiment_free(struct CdispExperiment *experiment);

/**
 * Sets one of `system.eta`, `system.g`, `drive.alpha`, `drive.alpha1`,
 * `drive.alpha2`. The change is rejected if the config no longer
 * validates.
 *
 * # Safety
 * `experiment` must be a live handle and `param` a NUL-terminated string.
 */
enum CdispStatus cdisp_experiment_set(struct CdispExperiment *experiment,
                                      const char *param,
                                      double value);

/**
 * Sets the resonator Fock dimension.
 *
 * # Safety
 * `experiment` must be a live handle.
 */
enum CdispStatus cdisp_experiment_set_fock_dim(struct CdispExperiment *experiment, size_t fock_dim);

/**
 * Sets the directory used by [`cdisp_experiment_run`].
 *
 * # Safety
 * `experiment` must be a live handle and `dir` a NUL-terminated string.
 */
enum CdispStatus cdisp_experiment_set_output_dir(struct CdispExperiment *experiment,
                                                 const char *dir);

/**
 * Runs the configured experiment and writes its result files.
 *
 * # Safety
 * `experiment` must be a live handle.
 */
enum CdispStatus cdisp_experiment_run(struct CdispExperiment *experiment);

/**
 * Average gate fidelity and its standard error over the configured random
 * states.
 *
 * # Safety
 * `experiment` must be a live handle; `mean` and `std_error` writable.
 */
enum CdispStatus cdisp_experiment_gate_fidelity(struct CdispExperiment *experiment,
                                                double *mean,
                                                double *std_error);

/**
 * Cat-state fidelity and the ideal branch amplitude 2 k g_eff / omega_r.
 *
 * # Safety
 * `experiment` must be a live handle; `fidelity` and `amplitude` writable.
 */
enum CdispStatus cdisp_experiment_cat_fidelity(struct CdispExperiment *experiment,
                                               double *fidelity,
                                               double *amplitude);

/**
 * First configured F_1 trace. Writes up to `capacity` samples of time (in
 * resonator periods) and fidelity, and the full sample count to `len`;
 * returns `BufferTooSmall` when `capacity < *len`.
 *
 * # Safety
 * `times` and `values` must hold `capacity` doubles; `len` writable.
 */
enum CdispStatus cdisp_experiment_fidelity_trace(struct CdispExperiment *experiment,
                                                 double *times,
                                                 double *values,
                                                 size_t capacity,
                                                 size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CDISP_H */
