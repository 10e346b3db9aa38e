#ifndef STARDISC_H
#define STARDISC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StardiscStatus {
  STARDISC_STATUS_OK = 0,
  STARDISC_STATUS_NULL_POINTER = 1,
  STARDISC_STATUS_INVALID_ARGUMENT = 2,
  STARDISC_STATUS_IO = 3,
  STARDISC_STATUS_GRID_TOO_LARGE = 4,
  STARDISC_STATUS_SOUNDNESS_VIOLATION = 5,
  STARDISC_STATUS_PANIC = 6,
} StardiscStatus;

typedef enum StardiscGenerator {
  STARDISC_GENERATOR_RANDOM = 0,
  STARDISC_GENERATOR_HALTON = 1,
  STARDISC_GENERATOR_HAMMERSLEY = 2,
  STARDISC_GENERATOR_GRID = 3,
} StardiscGenerator;

typedef enum StardiscSide {
  STARDISC_SIDE_OVERFILL = 0,
  STARDISC_SIDE_UNDERFILL = 1,
} StardiscSide;

/**
 * Opaque result of [`stardisc_certify`].
 */
typedef struct StardiscChainResult StardiscChainResult;

/**
 * Opaque point set handle.
 */
typedef struct StardiscPointSet StardiscPointSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *stardisc_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void stardisc_string_free(char *s);

/**
 * Builds a point set from `n * dim` row-major coordinates.
 *
 * # Safety
 * `coords` must point to `n * dim` readable doubles (it may be NULL when
 * `n == 0`); `out` must be writable.
 */
enum StardiscStatus stardisc_point_set_new(const double *coords,
                                           size_t n,
                                           size_t dim,
                                           struct StardiscPointSet **out);

/**
 * Reads a point set from a CSV point file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum StardiscStatus stardisc_point_set_from_csv(const char *path, struct StardiscPointSet **out);

/**
 * Generates a point set; `seed` is used by the random generator only.
 *
 * # Safety
 * `out` must be writable.
 */
enum StardiscStatus stardisc_generate(enum StardiscGenerator kind,
                                      size_t n,
                                      size_t dim,
                                      uint64_t seed,
                                      struct StardiscPointSet **out);

/**
 * # Safety
 * `points` must be NULL or a handle from this library, not yet freed.
 */
void stardisc_point_set_free(struct StardiscPointSet *points);

/**
 * Number of points, or 0 for NULL.
 *
 * # Safety
 * `points` must be NULL or a live handle.
 */
size_t stardisc_point_set_len(const struct StardiscPointSet *points);

/**
 * Dimension, or 0 for NULL.
 *
 * # Safety
 * `points` must be NULL or a live handle.
 */
size_t stardisc_point_set_dim(const struct StardiscPointSet *points);

/**
 * Exact star discrepancy. `threads == 0` uses the default pool and
 * `max_corners == 0` the default grid cap. `out_corner` may be NULL;
 * otherwise it receives `dim` doubles. `out_side` may be NULL.
 *
 * # Safety
 * `points` must be a live handle, `out_value` writable, `out_corner` NULL
 * or writable for `dim` doubles, `out_side` NULL or writable.
 */
enum StardiscStatus stardisc_star_discrepancy_exact(const struct StardiscPointSet *points,
                                                    uint64_t max_corners,
                                                    size_t threads,
                                                    double *out_value,
                                                    double *out_corner,
                                                    enum StardiscSide *out_side);

/**
 * Sampled lower bound on the star discrepancy.
 *
 * # Safety
 * `points` must be a live handle and `out_value` writable.
 */
enum StardiscStatus stardisc_star_discrepancy_sampled(const struct StardiscPointSet *points,
                                                      uint64_t trials,
                                                      uint64_t seed,
                                                      double *out_value);

/**
 * `⌊d/2⌋·⌊1/(βε)⌋` after validating the parameters.
 *
 * # Safety
 * `out` must be writable.
 */
enum StardiscStatus stardisc_guaranteed_chain_length(size_t dim,
                                                     double epsilon,
                                                     double beta,
                                                     uint64_t *out);

/**
 * Runs the chain adversary for the claim `D* <= epsilon`.
 *
 * # Safety
 * `points` must be a live handle and `out` writable.
 */
enum StardiscStatus stardisc_certify(const struct StardiscPointSet *points,
                                     double epsilon,
                                     double beta,
                                     struct StardiscChainResult **out);

/**
 * # Safety
 * `result` must be NULL or a handle from [`stardisc_certify`], not yet freed.
 */
void stardisc_chain_result_free(struct StardiscChainResult *result);

/**
 * True when the chain completed (certificate), false when refuted or NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
bool stardisc_chain_result_is_certificate(const struct StardiscChainResult *result);

/**
 * Number of chain steps: `k` for a certificate, the partial chain length
 * for a refutation.
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
size_t stardisc_chain_result_steps(const struct StardiscChainResult *result);

/**
 * Witness excess of a refutation; `InvalidArgument` for a certificate.
 *
 * # Safety
 * `result` must be a live handle and `out` writable.
 */
enum StardiscStatus stardisc_chain_result_excess(const struct StardiscChainResult *result,
                                                 double *out);

/**
 * Certificate or witness JSON, matching the `stardisc certify` output.
 * Release with [`stardisc_string_free`].
 *
 * # Safety
 * `result` must be a live handle and `out` writable.
 */
enum StardiscStatus stardisc_chain_result_to_json(const struct StardiscChainResult *result,
                                                  char **out);

/**
 * Re-checks a certificate JSON against `points`. A certificate that parses
 * but fails any check sets `*out_valid = false` and returns `Ok`; the
 * first failed check is then available from [`stardisc_last_error`].
 *
 * # Safety
 * `points` must be a live handle, `json` a NUL-terminated string and
 * `out_valid` writable.
 */
enum StardiscStatus stardisc_verify_certificate_json(const struct StardiscPointSet *points,
                                                     const char *json,
                                                     bool *out_valid);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STARDISC_H */
