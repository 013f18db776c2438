#ifndef HARDY_TRACE_H
#define HARDY_TRACE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call. The first five match the CLI exit codes.
 */
typedef enum HtStatus {
  HT_STATUS_OK = 0,
  HT_STATUS_USAGE = 1,
  HT_STATUS_DOMAIN = 2,
  HT_STATUS_NUMERICAL = 3,
  HT_STATUS_IO = 4,
  HT_STATUS_NULL_POINTER = 5,
  HT_STATUS_PANIC = 6,
} HtStatus;

/**
 * Opaque polynomial handle.
 */
typedef struct HtPolynomial HtPolynomial;

/**
 * A Monte-Carlo mean and its standard error.
 */
typedef struct HtEstimate {
  double re;
  double im;
  double stderr;
  uint64_t samples;
  uint64_t seed;
} HtEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the most recent failure on this thread, or `""`.
 *
 * The pointer stays valid until the next `ht_` call on the same thread.
 */
const char *ht_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void ht_string_free(char *s);

/**
 * Parses a polynomial document into a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum HtStatus ht_polynomial_from_json(const char *json, struct HtPolynomial **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `f` must be null or a live handle from [`ht_polynomial_from_json`].
 */
void ht_polynomial_free(struct HtPolynomial *f);

/**
 * The dimension `n` of a polynomial.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum HtStatus ht_polynomial_dim(const struct HtPolynomial *f, size_t *out);

/**
 * The canonical JSON document of a polynomial.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum HtStatus ht_polynomial_to_json(const struct HtPolynomial *f, char **out);

/**
 * `c_ω` as a `"num/den"` string.
 *
 * # Safety
 * `omega` must point to `n` readable values and `out` be writable.
 */
enum HtStatus ht_c_constant(const uint32_t *omega, size_t n, char **out);

/**
 * The exact moment `∫ζ^α ζ̄^β f dσ` as JSON `{"re": "p/q", "im": "p/q"}`.
 *
 * # Safety
 * `alpha` and `beta` must point to `n` readable values each.
 */
enum HtStatus ht_moment(const struct HtPolynomial *f,
                        const uint32_t *alpha,
                        const uint32_t *beta,
                        size_t n,
                        char **out);

/**
 * Membership certificate as JSON; non-members are swept from `order` upward.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum HtStatus ht_check(const struct HtPolynomial *f, uint32_t order, char **out);

/**
 * Every violated condition with `|α|, |β| ≤ order`, as a JSON array.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum HtStatus ht_sweep(const struct HtPolynomial *f, uint32_t order, char **out);

/**
 * `{"residual_sq": "p/q", "projection": {...}}`.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum HtStatus ht_szego_residual(const struct HtPolynomial *f, char **out);

/**
 * Monte-Carlo `∫ζ^α ζ̄^β f dσ` from `samples` draws of the stream `seed`.
 *
 * # Safety
 * `alpha` and `beta` must point to `n` readable values each; `out` writable.
 */
enum HtStatus ht_mc_moment(const struct HtPolynomial *f,
                           const uint32_t *alpha,
                           const uint32_t *beta,
                           size_t n,
                           uint64_t seed,
                           uint64_t samples,
                           struct HtEstimate *out);

/**
 * `C(z,w) = (1 − ⟨z,w⟩)^{−n}`.
 *
 * # Safety
 * `z` and `w` must point to `2n` readable doubles; outputs writable.
 */
enum HtStatus ht_cauchy_kernel(const double *z,
                               const double *w,
                               size_t n,
                               double *out_re,
                               double *out_im);

/**
 * `P(z,ζ)` for `z` in the ball and `ζ` on the sphere.
 *
 * # Safety
 * `z` and `zeta` must point to `2n` readable doubles; `out` writable.
 */
enum HtStatus ht_poisson_kernel(const double *z, const double *zeta, size_t n, double *out);

/**
 * Radial scan CSV (`r,p,lp_error,lp_error_stderr,lp_norm_r,samples,seed`).
 *
 * # Safety
 * `radii` must point to `n_radii` readable doubles; `out` writable.
 */
enum HtStatus ht_radial_scan(const struct HtPolynomial *f,
                             double p,
                             const double *radii,
                             size_t n_radii,
                             uint64_t samples,
                             uint64_t seed,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARDY_TRACE_H */
