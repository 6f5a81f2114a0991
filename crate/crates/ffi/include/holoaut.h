#ifndef HOLOAUT_H
#define HOLOAUT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum HaStatus {
  HA_STATUS_OK = 0,
  HA_STATUS_NULL_POINTER = 1,
  HA_STATUS_INVALID_INPUT = 2,
  HA_STATUS_POLE = 3,
  HA_STATUS_NOT_UNIMODULAR = 4,
  HA_STATUS_CONTINUATION = 5,
  HA_STATUS_NOT_IN_DOMAIN = 6,
  HA_STATUS_CONFIG = 7,
  HA_STATUS_SEARCH_FAILED = 8,
  HA_STATUS_PANIC = 9,
} HaStatus;

/**
 * Opaque element of the universal cover of PSL(2,R).
 */
typedef struct HaCoverElement HaCoverElement;

/**
 * Opaque SL(2,C) matrix.
 */
typedef struct HaMatrix HaMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next call into the library on this thread.
 */
const char *ha_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *ha_version(void);

/**
 * Builds a matrix from 8 reals `(re a, im a, re b, im b, ...)`; the
 * determinant must be 1 within tolerance.
 *
 * # Safety
 * `entries` must point to 8 readable doubles and `out` must be writable.
 */
enum HaStatus ha_matrix_new(const double *entries, struct HaMatrix **out);

/**
 * `k(theta) a(s) n(u)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum HaStatus ha_matrix_iwasawa(double theta, double s, double u, struct HaMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from this library that is not used again.
 */
void ha_matrix_free(struct HaMatrix *m);

/**
 * # Safety
 * `a`, `b` must be live handles and `out` writable.
 */
enum HaStatus ha_matrix_mul(const struct HaMatrix *a,
                            const struct HaMatrix *b,
                            struct HaMatrix **out);

/**
 * Writes the 8 reals of `m` to `out`.
 *
 * # Safety
 * `m` must be a live handle and `out` must hold 8 doubles.
 */
enum HaStatus ha_matrix_entries(const struct HaMatrix *m, double *out);

/**
 * `(a z + b) / (c z + d)`.
 *
 * # Safety
 * `m` must be a live handle; `out_re`, `out_im` writable.
 */
enum HaStatus ha_mobius_apply(const struct HaMatrix *m,
                              double z_re,
                              double z_im,
                              double *out_re,
                              double *out_im);

/**
 * `psi(g) = (a + d) + i(c - b)`.
 *
 * # Safety
 * `m` must be a live handle; `out_re`, `out_im` writable.
 */
enum HaStatus ha_psi(const struct HaMatrix *m, double *out_re, double *out_im);

/**
 * `phi(g) = psi(g)^2 / 4`, independent of the sign of `g`.
 *
 * # Safety
 * `m` must be a live handle; `out_re`, `out_im` writable.
 */
enum HaStatus ha_phi(const struct HaMatrix *m, double *out_re, double *out_im);

/**
 * `loops` generator loops followed by the short path to `k(theta) a(s) n(u)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum HaStatus ha_cover_from_iwasawa(double theta,
                                    double s,
                                    double u,
                                    int64_t loops,
                                    struct HaCoverElement **out);

/**
 * The central element reached by `n` generator loops.
 *
 * # Safety
 * `out` must be writable.
 */
enum HaStatus ha_cover_deck(int64_t n, struct HaCoverElement **out);

/**
 * # Safety
 * `x`, `y` must be live handles and `out` writable.
 */
enum HaStatus ha_cover_mul(const struct HaCoverElement *x,
                           const struct HaCoverElement *y,
                           struct HaCoverElement **out);

/**
 * # Safety
 * `x` must be a live handle and `out` writable.
 */
enum HaStatus ha_cover_inv(const struct HaCoverElement *x, struct HaCoverElement **out);

/**
 * The continued value of `log phi` at the endpoint.
 *
 * # Safety
 * `x` must be a live handle; `out_re`, `out_im` writable.
 */
enum HaStatus ha_cover_branch(const struct HaCoverElement *x, double *out_re, double *out_im);

/**
 * # Safety
 * `x` must be a live handle and `out` writable.
 */
enum HaStatus ha_cover_loop_count(const struct HaCoverElement *x, int64_t *out);

/**
 * Copies the endpoint into a new matrix handle.
 *
 * # Safety
 * `x` must be a live handle and `out` writable.
 */
enum HaStatus ha_cover_endpoint(const struct HaCoverElement *x, struct HaMatrix **out);

/**
 * # Safety
 * `x` must be null or a handle from this library that is not used again.
 */
void ha_cover_free(struct HaCoverElement *x);

/**
 * Membership of `(u, v, w)`, given as 6 reals, in the Heisenberg domain.
 *
 * # Safety
 * `point` must hold 6 doubles and `out` must be writable.
 */
enum HaStatus ha_heisenberg_in_omega(const double *point, bool *out);

/**
 * Runs a command given as a JSON array of CLI arguments without the
 * program name, e.g. `["verify-winding", "--seed", "3"]`. On success
 * `out_json` receives the report bundle and `out_exit` the exit status the
 * binary would return. Output flags (`--out`, `--format`) are ignored.
 *
 * # Safety
 * `args_json` must be a nul-terminated string; the out-pointers writable.
 */
enum HaStatus ha_run(const char *args_json, char **out_json, int32_t *out_exit);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string from this library that is not used again.
 */
void ha_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOLOAUT_H */
