#ifndef TRAPWALK_H
#define TRAPWALK_H

/* Generated by cbindgen from trapwalk-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum TrapwalkStatus {
  TRAPWALK_STATUS_OK = 0,
  TRAPWALK_STATUS_NULL_POINTER = 1,
  TRAPWALK_STATUS_INVALID_ARGUMENT = 2,
  TRAPWALK_STATUS_PARSE_FAILED = 3,
  TRAPWALK_STATUS_INFINITE_MEAN = 4,
  TRAPWALK_STATUS_HORIZON_TOO_LARGE = 5,
  TRAPWALK_STATUS_ZERO_ESCAPE = 6,
  TRAPWALK_STATUS_INTERNAL_ERROR = 7,
} TrapwalkStatus;

/**
 * Opaque trapping-time distribution handle.
 */
typedef struct TrapwalkDist TrapwalkDist;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static name of a status code (never NULL).
 */
const char *trapwalk_status_name(enum TrapwalkStatus status);

/**
 * Parses a distribution spec (`exp:<l>`, `zeta:<q>`, `det:<tau0>`,
 * `custom:<path>`) into a new handle written to `out`.
 *
 * # Safety
 * `spec` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum TrapwalkStatus trapwalk_dist_parse(const char *spec, struct TrapwalkDist **out);

/**
 * Releases a handle created by `trapwalk_dist_parse`. NULL is a no-op.
 *
 * # Safety
 * `dist` must be a handle from `trapwalk_dist_parse`, not yet freed.
 */
void trapwalk_dist_free(struct TrapwalkDist *dist);

/**
 * P(T = tau).
 *
 * # Safety
 * `dist` must be a live handle and `out` a valid pointer.
 */
enum TrapwalkStatus trapwalk_dist_pmf(const struct TrapwalkDist *dist, uint64_t tau, double *out);

/**
 * P(T >= tau).
 *
 * # Safety
 * `dist` must be a live handle and `out` a valid pointer.
 */
enum TrapwalkStatus trapwalk_dist_tail(const struct TrapwalkDist *dist, uint64_t tau, double *out);

/**
 * E(T^alpha). `*finite` is 1 when the moment is finite (then `*out` holds
 * it) and 0 when it diverges.
 *
 * # Safety
 * `dist` must be a live handle; `out` and `finite` valid pointers.
 */
enum TrapwalkStatus trapwalk_dist_moment(const struct TrapwalkDist *dist,
                                         double alpha,
                                         double *out,
                                         int32_t *finite);

/**
 * D = 1/(E(T)+1); fails with `INFINITE_MEAN` when E(T) diverges.
 *
 * # Safety
 * `dist` must be a live handle and `out` a valid pointer.
 */
enum TrapwalkStatus trapwalk_dist_diffusion_coefficient(const struct TrapwalkDist *dist,
                                                        double *out);

/**
 * Stationary trap-countdown law pi(tau).
 *
 * # Safety
 * `dist` must be a live handle and `out` a valid pointer.
 */
enum TrapwalkStatus trapwalk_dist_stationary(const struct TrapwalkDist *dist,
                                             uint64_t tau,
                                             double *out);

/**
 * Exact MSD sequence sigma^2_t for t = 0..=n; `out` must hold n+1 doubles.
 *
 * # Safety
 * `dist` must be a live handle; `out` must point to n+1 writable doubles.
 */
enum TrapwalkStatus trapwalk_msd_series(const struct TrapwalkDist *dist, uintptr_t n, double *out);

/**
 * Renewal mass Q_t for t = 0..=n; `out` must hold n+1 doubles.
 *
 * # Safety
 * `dist` must be a live handle; `out` must point to n+1 writable doubles.
 */
enum TrapwalkStatus trapwalk_renewal_mass(const struct TrapwalkDist *dist,
                                          uintptr_t n,
                                          double *out);

/**
 * Exact law of X_t: writes P(X_t = z) for z = -t..=t into `out`, which must
 * hold 2t+1 doubles (index z+t).
 *
 * # Safety
 * `dist` must be a live handle; `out` must point to 2t+1 writable doubles.
 */
enum TrapwalkStatus trapwalk_position_distribution(const struct TrapwalkDist *dist,
                                                   uintptr_t t,
                                                   double *out);

/**
 * Exact law of the renewal count N_t: writes P(N_t = n) for n = 0..=t+1
 * into `out`, which must hold t+2 doubles.
 *
 * # Safety
 * `dist` must be a live handle; `out` must point to t+2 writable doubles.
 */
enum TrapwalkStatus trapwalk_count_distribution(const struct TrapwalkDist *dist,
                                                uintptr_t t,
                                                double *out);

/**
 * Empirical MSD over `m` walkers with the reproducible splittable RNG.
 * `msd_out` must hold n+1 doubles; `se_out` may be NULL or hold n+1.
 *
 * # Safety
 * `dist` must be a live handle; buffers must satisfy the stated lengths.
 */
enum TrapwalkStatus trapwalk_ensemble_msd(const struct TrapwalkDist *dist,
                                          uintptr_t n,
                                          uintptr_t m,
                                          uint64_t seed,
                                          double *msd_out,
                                          double *se_out);

/**
 * One exact trajectory: `positions` must hold n+1 int64, `traps` may be
 * NULL or hold n+1 uint64. The walker stream is keyed by (seed, 0).
 *
 * # Safety
 * `dist` must be a live handle; buffers must satisfy the stated lengths.
 */
enum TrapwalkStatus trapwalk_simulate_trajectory(const struct TrapwalkDist *dist,
                                                 uintptr_t n,
                                                 uint64_t seed,
                                                 int64_t *positions,
                                                 uint64_t *traps);

/**
 * Riemann zeta for s > 1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TrapwalkStatus trapwalk_zeta(double s, double *out);

/**
 * OLS power-law fit of `sigma2[t]` (indexed from t = 0, `len` entries)
 * over integer t in [t_min, t_max]; any of the three outputs may be NULL.
 *
 * # Safety
 * `sigma2` must point to `len` readable doubles; non-NULL outputs valid.
 */
enum TrapwalkStatus trapwalk_powerlaw_fit(const double *sigma2,
                                          uintptr_t len,
                                          uintptr_t t_min,
                                          uintptr_t t_max,
                                          double *beta,
                                          double *log_intercept,
                                          double *rms);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRAPWALK_H */
