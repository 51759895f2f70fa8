#ifndef HYPERCTL_H
#define HYPERCTL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The numeric values of 2, 3 and 4 match the CLI exit codes.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_CONFIG = 2,
  HC_STATUS_SOLVER = 3,
  HC_STATUS_INVARIANT = 4,
  HC_STATUS_DOMAIN = 5,
  HC_STATUS_IO = 6,
  HC_STATUS_BUFFER_TOO_SMALL = 7,
  HC_STATUS_PANIC = 8,
} HcStatus;

/**
 * Opaque flux model.
 */
typedef struct HcModel HcModel;

/**
 * Opaque front-tracking simulation.
 */
typedef struct HcSimulation HcSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t hc_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hc_version(void);

/**
 * Isentropic gas with constants `K`, `γ` in density/velocity variables.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum HcStatus hc_model_gas(double k, double gamma, struct HcModel **out);

/**
 * Linear flux `f(u) = Au` from a row-major `n×n` matrix.
 *
 * # Safety
 * `matrix` must point to `n*n` doubles and `out` to a handle slot.
 */
enum HcStatus hc_model_linear(size_t n, const double *matrix, struct HcModel **out);

/**
 * # Safety
 * `model` must be null or a handle from a `hc_model_*` constructor, freed once.
 */
void hc_model_free(struct HcModel *model);

/**
 * Number of conserved quantities, 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t hc_model_dim(const struct HcModel *model);

/**
 * Point `Ψ_i(σ)(u0)` of the Lax curve of 0-based family `family`.
 *
 * # Safety
 * `u0` and `out_state` must hold `n` doubles; `out_speed` may be null.
 */
enum HcStatus hc_lax_curve(const struct HcModel *model,
                           const double *u0,
                           size_t n,
                           size_t family,
                           double sigma,
                           double *out_state,
                           double *out_speed);

/**
 * Strengths `σ_1..σ_n` of the Riemann problem `(ul, ur)`.
 *
 * # Safety
 * `ul`, `ur` and `out_sigma` must hold `n` doubles.
 */
enum HcStatus hc_riemann_solve(const struct HcModel *model,
                               const double *ul,
                               const double *ur,
                               size_t n,
                               double *out_sigma);

/**
 * Starts a simulation on `[a, b]` from piecewise-constant data with
 * `nbreaks` interior breakpoints and `nbreaks + 1` row-major states.
 *
 * # Safety
 * `breaks` must hold `nbreaks` doubles, `values` `(nbreaks + 1) * dim` doubles,
 * and `out` must be a valid handle slot. The model handle may be freed afterwards.
 */
enum HcStatus hc_sim_new(const struct HcModel *model,
                         double a,
                         double b,
                         size_t nbreaks,
                         const double *breaks,
                         const double *values,
                         double epsilon,
                         struct HcSimulation **out);

/**
 * # Safety
 * `sim` must be null or a handle from [`hc_sim_new`], freed once.
 */
void hc_sim_free(struct HcSimulation *sim);

/**
 * Advances to time `t` (no-op if `t` is not ahead of the current time).
 *
 * # Safety
 * `sim` must be a live handle not used concurrently.
 */
enum HcStatus hc_sim_advance(struct HcSimulation *sim, double t);

/**
 * Current time, NaN for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
double hc_sim_time(const struct HcSimulation *sim);

/**
 * Number of fronts inside the domain.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
size_t hc_sim_front_count(const struct HcSimulation *sim);

/**
 * Number of wave interactions resolved so far.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
size_t hc_sim_interaction_count(const struct HcSimulation *sim);

/**
 * Euclidean total variation of the current profile, NaN for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
double hc_sim_total_variation(const struct HcSimulation *sim);

/**
 * Value `u(t, x)` of the current profile.
 *
 * # Safety
 * `out` must hold `n` doubles, `n` equal to the model dimension.
 */
enum HcStatus hc_sim_value_at(const struct HcSimulation *sim, double x, double *out, size_t n);

/**
 * Runs a scenario file and writes its reports to `out_dir`.
 *
 * # Safety
 * Both arguments must be NUL-terminated UTF-8 paths.
 */
enum HcStatus hc_run_scenario(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERCTL_H */
