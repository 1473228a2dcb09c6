#ifndef D2D_CACHE_H
#define D2D_CACHE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum D2dStatus {
  D2D_STATUS_OK = 0,
  D2D_STATUS_NULL_POINTER = 1,
  D2D_STATUS_INVALID_UTF8 = 2,
  D2D_STATUS_CONFIG_ERROR = 3,
  D2D_STATUS_INVALID_PARAMS = 4,
  D2D_STATUS_CHECK_FAILED = 5,
  D2D_STATUS_NO_SOLUTION = 6,
  D2D_STATUS_OVERFLOW = 7,
  D2D_STATUS_PANIC = 8,
} D2dStatus;

/**
 * Validated system parameters.
 */
typedef struct D2dParams D2dParams;

/**
 * An exact rational, `num / den`, with its float value.
 */
typedef struct D2dRational {
  int64_t num;
  int64_t den;
  double value;
} D2dRational;

typedef struct D2dRates {
  struct D2dRational t;
  struct D2dRational det;
  struct D2dRational det_naive;
  struct D2dRational converse;
  struct D2dRational basestation;
} D2dRates;

typedef struct D2dRandomRun {
  size_t k;
  size_t distinct_symbols;
  bool decoded;
  double measured_rate;
} D2dRandomRun;

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *d2d_last_error(void);

/**
 * Library version, static storage.
 */
const char *d2d_version(void);

/**
 * Parses and validates a JSON configuration.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum D2dStatus d2d_params_from_json(const char *json, struct D2dParams **out);

/**
 * # Safety
 * `params` must come from [`d2d_params_from_json`] and not be used again.
 */
void d2d_params_free(struct D2dParams *params);

/**
 * Closed-form rates for the configured `(n, m, M)`.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer.
 */
enum D2dStatus d2d_rates(const struct D2dParams *params, struct D2dRates *out);

/**
 * Fixed point `rho*` of `x = 1 - exp(-t x)` and `rho = (1 - epsilon) rho*`.
 *
 * # Safety
 * `rho_star` and `rho` must be valid pointers.
 */
enum D2dStatus d2d_solve_rho(double t, double epsilon, double *rho_star, double *rho);

/**
 * Decentralized rate and its upper bound.
 *
 * # Safety
 * `exact` and `upper` must be valid pointers.
 */
enum D2dStatus d2d_rand_rate(uint64_t n,
                             uint64_t m,
                             double cache,
                             double rho,
                             double *exact,
                             double *upper);

/**
 * Worst-case measured rate of the deterministic scheme over the periodic
 * demand family, every decode checked.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer.
 */
enum D2dStatus d2d_simulate_det(const struct D2dParams *params, struct D2dRational *out);

/**
 * JSON-lines transcript of the deterministic delivery for the aligned
 * demand `files[0..len]` (0-based file indices). Free the result with
 * [`d2d_string_free`].
 *
 * # Safety
 * `params` must be a live handle, `files` must point to `len` values and
 * `out` must be a valid pointer.
 */
enum D2dStatus d2d_det_transcript(const struct D2dParams *params,
                                  const uint32_t *files,
                                  size_t len,
                                  char **out);

/**
 * One run of decentralized caching with `K` source symbols per packet for
 * the demand `f_u = u mod m`.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer.
 */
enum D2dStatus d2d_simulate_random(const struct D2dParams *params,
                                   size_t k,
                                   double rho,
                                   uint64_t seed,
                                   struct D2dRandomRun *out);

/**
 * # Safety
 * `s` must come from this library and not be used again.
 */
void d2d_string_free(char *s);

#endif  /* D2D_CACHE_H */
