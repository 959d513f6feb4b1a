#ifndef POVM_DOMAIN_H
#define POVM_DOMAIN_H

/* Generated from the Rust sources by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a C API call.
 */
typedef enum PdStatus {
  /**
   * Call succeeded.
   */
  PD_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PD_STATUS_NULL_POINTER = 1,
  /**
   * An argument was structurally valid but unusable (wrong dimension,
   * zero shots, non-finite tolerance, ...).
   */
  PD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A string was not valid UTF-8 or not valid JSON for the schema.
   */
  PD_STATUS_PARSE_ERROR = 3,
  /**
   * The parsed object violates a physical constraint.
   */
  PD_STATUS_VALIDATION_ERROR = 4,
  /**
   * An iterative kernel failed to converge.
   */
  PD_STATUS_NUMERICAL_ERROR = 5,
  /**
   * A caller-supplied buffer has the wrong length.
   */
  PD_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * A panic was caught at the boundary; state is unspecified.
   */
  PD_STATUS_INTERNAL_ERROR = 7,
} PdStatus;

/**
 * Feasibility of a count record against the physical domain.
 */
typedef enum PdVerdict {
  /**
   * The frequencies are the image of a density matrix.
   */
  PD_VERDICT_FEASIBLE = 0,
  /**
   * Unphysical frequencies whose error box reaches the domain.
   */
  PD_VERDICT_MARGINAL = 1,
  /**
   * The error box misses the domain entirely.
   */
  PD_VERDICT_INSUFFICIENT = 2,
} PdVerdict;

/**
 * Opaque measurement handle.
 */
typedef struct PdPovm PdPovm;

/**
 * Opaque density matrix handle.
 */
typedef struct PdState PdState;

/**
 * Membership diagnostics for a probability vector.
 */
typedef struct PdMembership {
  /**
   * Nonzero when the vector is the image of a density matrix.
   */
  bool inside;
  /**
   * Smallest eigenvalue of the reconstructed matrix.
   */
  double min_eigenvalue;
  /**
   * Euclidean distance from the vector to the affine span of the map.
   */
  double consistency_residual;
  /**
   * Nonzero when the measurement is informationally incomplete and the
   * reconstruction picked the minimum-norm candidate.
   */
  bool non_unique;
} PdMembership;

/**
 * Diagnostics accompanying a tomographic estimate.
 */
typedef struct PdInversionInfo {
  /**
   * Distance from the input frequencies to the affine span.
   */
  double consistency_residual;
  /**
   * Rank of the affine map.
   */
  size_t effective_dimension;
  /**
   * Nonzero when the solution is a minimum-norm representative.
   */
  bool non_unique;
  /**
   * Smallest eigenvalue of the raw inversion before repair.
   */
  double min_eigenvalue_raw;
} PdInversionInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread; empty string when no call failed
 * yet. The pointer stays valid until the next failing call on the same
 * thread. Never null. Do not free.
 */
const char *pd_last_error_message(void);

/**
 * Library version as a static string. Do not free.
 */
const char *pd_version(void);

/**
 * Releases a string returned through a `char**` out parameter.
 *
 * # Safety
 * `s` must be a pointer produced by this library and not freed before.
 */
void pd_string_free(char *s);

/**
 * Parses a density matrix from `{"d": ..., "matrix": [[[re, im], ...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PdStatus pd_state_parse_json(const char *json, struct PdState **out);

/**
 * Serializes a state back to its JSON schema.
 *
 * # Safety
 * `state` must be a live handle and `out` a valid pointer.
 */
enum PdStatus pd_state_to_json(const struct PdState *state, char **out);

/**
 * Releases a state handle.
 *
 * # Safety
 * `state` must come from this library and not be freed twice.
 */
void pd_state_free(struct PdState *state);

/**
 * Order of the density matrix behind a handle.
 *
 * # Safety
 * `state` must be a live handle and `out` a valid pointer.
 */
enum PdStatus pd_state_dim(const struct PdState *state, size_t *out);

/**
 * Creates the maximally mixed state `identity / dim`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PdStatus pd_state_maximally_mixed(size_t dim, struct PdState **out);

/**
 * Draws a reproducible random state of the given rank.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PdStatus pd_state_random(size_t dim, size_t rank, uint64_t seed, struct PdState **out);

/**
 * Parses a measurement from `{"d": ..., "effects": [...]}` and checks it
 * is a valid POVM under `tol`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PdStatus pd_povm_parse_json(const char *json, double tol, struct PdPovm **out);

/**
 * Serializes a measurement back to its JSON schema.
 *
 * # Safety
 * `povm` must be a live handle and `out` a valid pointer.
 */
enum PdStatus pd_povm_to_json(const struct PdPovm *povm, char **out);

/**
 * Releases a measurement handle.
 *
 * # Safety
 * `povm` must come from this library and not be freed twice.
 */
void pd_povm_free(struct PdPovm *povm);

/**
 * Hilbert space dimension of a measurement.
 *
 * # Safety
 * `povm` must be a live handle and `out` a valid pointer.
 */
enum PdStatus pd_povm_dim(const struct PdPovm *povm, size_t *out);

/**
 * Number of outcomes of a measurement.
 *
 * # Safety
 * `povm` must be a live handle and `out` a valid pointer.
 */
enum PdStatus pd_povm_outcomes(const struct PdPovm *povm, size_t *out);

/**
 * Creates the symmetric four-outcome qubit measurement.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PdStatus pd_povm_tetrahedral(struct PdPovm **out);

/**
 * Draws a reproducible random measurement with `n` outcomes.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PdStatus pd_povm_random(size_t dim, size_t n, uint64_t seed, struct PdPovm **out);

/**
 * Writes the validation report for a measurement as JSON and its overall
 * flag to `out_ok`. `out_report_json` may be null when only the flag is
 * wanted.
 *
 * # Safety
 * `povm` must be a live handle, `out_ok` a valid pointer, and
 * `out_report_json` null or valid.
 */
enum PdStatus pd_povm_validate(const struct PdPovm *povm,
                               double tol,
                               bool *out_ok,
                               char **out_report_json);

/**
 * Rank of the affine map of a measurement.
 *
 * # Safety
 * `povm` must be a live handle and `out` a valid pointer.
 */
enum PdStatus pd_effective_dimension(const struct PdPovm *povm, double tol, size_t *out);

/**
 * Outcome probabilities of a state under a measurement. `buf` must hold
 * exactly `pd_povm_outcomes` entries.
 *
 * # Safety
 * Handles must be live; `buf` must point to `buf_len` writable doubles.
 */
enum PdStatus pd_probabilities(const struct PdState *state,
                               const struct PdPovm *povm,
                               double *buf,
                               size_t buf_len);

/**
 * Tests whether a probability vector is the image of a density matrix.
 * `out_witness` may be null; when non-null and the vector is inside, it
 * receives a new state handle.
 *
 * # Safety
 * `q` must point to `len` readable doubles; `povm` must be live; `out`
 * must be valid; `out_witness` null or valid.
 */
enum PdStatus pd_membership(const double *q,
                            size_t len,
                            const struct PdPovm *povm,
                            double tol,
                            struct PdMembership *out,
                            struct PdState **out_witness);

/**
 * Linear inversion of a probability vector followed by projection onto
 * the physical set. Diagnostics describe the raw inversion.
 *
 * # Safety
 * `q` must point to `len` readable doubles; `povm` must be live;
 * `out_state` and `out_info` must be valid pointers.
 */
enum PdStatus pd_tomography_estimate(const double *q,
                                     size_t len,
                                     const struct PdPovm *povm,
                                     struct PdState **out_state,
                                     struct PdInversionInfo *out_info);

/**
 * Simulates `shots` measurements of a state. `counts` must hold exactly
 * `pd_povm_outcomes` entries.
 *
 * # Safety
 * Handles must be live; `counts` must point to `len` writable u64.
 */
enum PdStatus pd_simulate_counts(const struct PdState *state,
                                 const struct PdPovm *povm,
                                 uint64_t shots,
                                 uint64_t seed,
                                 uint64_t *counts,
                                 size_t len);

/**
 * Classifies a count record against the physical domain. On a feasible or
 * marginal verdict, `out_estimate` (when non-null) receives a state
 * handle; on a marginal verdict, `out_boundary` (when non-null, length
 * `len`) receives the in-domain point found inside the error box.
 *
 * # Safety
 * `counts` must point to `len` readable u64; `povm` must be live;
 * `out_verdict` must be valid; `out_estimate` and `out_boundary` null or
 * valid.
 */
enum PdStatus pd_classify(const uint64_t *counts,
                          size_t len,
                          const struct PdPovm *povm,
                          double k,
                          size_t budget,
                          uint64_t seed,
                          double tol,
                          enum PdVerdict *out_verdict,
                          struct PdState **out_estimate,
                          double *out_boundary);

/**
 * Maps a four-outcome probability vector to the tetrahedron coordinates
 * `(x, y, z)`. `out_xyz` must hold three doubles.
 *
 * # Safety
 * `q` must point to `len` readable doubles; `out_xyz` to three writable
 * doubles.
 */
enum PdStatus pd_tetrahedron_coordinates(const double *q, size_t len, double *out_xyz);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POVM_DOMAIN_H */
