#ifndef RANK2_CLUSTER_H
#define RANK2_CLUSTER_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum R2Status {
  R2_STATUS_OK = 0,
  /**
   * Bad arguments: null pointers, b or c below 1, malformed JSON.
   */
  R2_STATUS_INVALID_ARGUMENT = 1,
  /**
   * A recurrence division was not exact.
   */
  R2_STATUS_NOT_DIVISIBLE = 2,
  /**
   * The computation could not decide (budget, rigidity, interpolation).
   */
  R2_STATUS_INCONCLUSIVE = 3,
  /**
   * A verification ran and found a counterexample.
   */
  R2_STATUS_CHECK_FAILED = 4,
  /**
   * Internal error, including caught panics.
   */
  R2_STATUS_INTERNAL = 5,
} R2Status;

/**
 * Opaque Laurent polynomial.
 */
typedef struct R2Polynomial R2Polynomial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *r2_last_error_message(void);

/**
 * Cluster variable `x_k` of `A(b, c)` in the initial cluster.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum R2Status r2_cluster_variable(int64_t b, int64_t c, int64_t k, struct R2Polynomial **out);

/**
 * `x_k` written in the cluster `(x_m, x_{m+1})` with variables `y1, y2`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum R2Status r2_expand_in_cluster(int64_t b,
                                   int64_t c,
                                   int64_t k,
                                   int64_t m,
                                   struct R2Polynomial **out);

/**
 * Caldero-Chapoton character of the object attached to `x_k`, over the
 * `u` variables of `K_{b,c}`, or its folding onto `x1, x2` when `fold` is set.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum R2Status r2_cc_polynomial(int64_t b,
                               int64_t c,
                               int64_t k,
                               uint64_t seed,
                               bool fold,
                               struct R2Polynomial **out);

/**
 * Smallest period `<= max_period` of the sequence `x_k`; writes 0 when none.
 *
 * # Safety
 * `out_period` must be a valid pointer.
 */
enum R2Status r2_detect_period(int64_t b, int64_t c, uint32_t max_period, uint32_t *out_period);

/**
 * Compares folded characters with the recurrence for `k_min <= k <= k_max`.
 * Returns `CheckFailed` if any index failed, `Inconclusive` if some could not
 * be resolved, `Ok` otherwise. Counts are written when the pointers are
 * non-null.
 *
 * # Safety
 * Each non-null output pointer must be valid for writes.
 */
enum R2Status r2_verify_folding(int64_t b,
                                int64_t c,
                                int64_t k_min,
                                int64_t k_max,
                                uint64_t seed,
                                uint32_t *passed,
                                uint32_t *failed,
                                uint32_t *inconclusive);

/**
 * Parses the JSON form `{"variables": [...], "terms": [...]}`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum R2Status r2_polynomial_from_json(const char *json, struct R2Polynomial **out);

/**
 * Fraction form such as `(1 + x2) / x1`. Null if `p` is null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
char *r2_polynomial_to_string(const struct R2Polynomial *p);

/**
 * Canonical JSON form. Null if `p` is null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
char *r2_polynomial_to_json(const struct R2Polynomial *p);

/**
 * Number of nonzero terms; 0 for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t r2_polynomial_num_terms(const struct R2Polynomial *p);

/**
 * True when every coefficient is positive; false for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
bool r2_polynomial_is_positive(const struct R2Polynomial *p);

/**
 * Equality of canonical forms (same variables, same terms); false if either
 * is null.
 *
 * # Safety
 * Both pointers must be null or live handles.
 */
bool r2_polynomial_equal(const struct R2Polynomial *a, const struct R2Polynomial *b);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void r2_polynomial_free(struct R2Polynomial *p);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void r2_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANK2_CLUSTER_H */
