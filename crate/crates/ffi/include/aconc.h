/* C interface of the alpha-concurrence library. */

#ifndef ACONC_H
#define ACONC_H

/* Generated by cbindgen from aconc-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status of an FFI call.
 */
typedef enum {
  ACONC_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  ACONC_STATUS_NULL_ARGUMENT = 1,
  /*
   A string argument was not valid UTF-8.
   */
  ACONC_STATUS_INVALID_UTF8 = 2,
  /*
   File could not be read or written.
   */
  ACONC_STATUS_IO = 3,
  /*
   File is not valid JSON or does not match the state schema.
   */
  ACONC_STATUS_PARSE = 4,
  /*
   A parameter was outside its domain (dimensions, alpha, weights...).
   */
  ACONC_STATUS_DOMAIN = 5,
  /*
   A state or ensemble invariant failed to hold.
   */
  ACONC_STATUS_INVARIANT = 6,
  /*
   Invalid optimizer configuration.
   */
  ACONC_STATUS_CONFIG = 7,
  /*
   The operation is not defined for this kind of state.
   */
  ACONC_STATUS_WRONG_KIND = 8,
  /*
   The roof search hit its iteration cap before converging; the
   reported value is still a valid upper bound.
   */
  ACONC_STATUS_NO_CONVERGENCE = 9,
  /*
   An unexpected internal failure.
   */
  ACONC_STATUS_INTERNAL = 10,
} AconcStatus;

/*
 Which side of a [`AconcBoundReport`] attained the maximum norm.
 */
typedef enum {
  ACONC_BOUND_BRANCH_PPT = 0,
  ACONC_BOUND_BRANCH_REALIGNMENT = 1,
  ACONC_BOUND_BRANCH_BOTH = 2,
} AconcBoundBranch;

/*
 Opaque handle over a pure or mixed state.
 */
typedef struct AconcState AconcState;

/*
 Lower-bound report for a mixed state.
 */
typedef struct {
  double ppt_norm;
  double realign_norm;
  double lower_bound;
  AconcBoundBranch branch;
} AconcBoundReport;

/*
 Options for the decomposition search. Zero `ensemble_size` means the
 built-in default of min(rank^2, rank + 4).
 */
typedef struct {
  size_t restarts;
  size_t max_iters;
  size_t ensemble_size;
  uint64_t seed;
} AconcRoofOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message on this thread into `buf` (NUL-terminated,
 truncated to `cap`). Returns the untruncated length without the NUL.
 */
size_t aconc_last_error_message(char *buf, size_t cap);

/*
 Static description of a status code.
 */
const char *aconc_status_name(AconcStatus status);

/*
 Loads a state file (the JSON schema of the library) into a new handle.
 */
AconcStatus aconc_state_load(const char *path, AconcState **out);

/*
 Saves the state behind `handle` to `path`.
 */
AconcStatus aconc_state_save(const AconcState *handle, const char *path);

/*
 Builds a pure state from `len` interleaved `(re, im)` pairs, row-major
 over the product basis. The amplitudes must already be normalized.
 */
AconcStatus aconc_state_pure_new(size_t dim_a,
                                 size_t dim_b,
                                 const double *re_im,
                                 size_t len,
                                 AconcState **out);

/*
 Isotropic state of fidelity `f` on d x d.
 */
AconcStatus aconc_state_isotropic(size_t d, double f, AconcState **out);

/*
 Werner state of antisymmetric weight `w` on d x d.
 */
AconcStatus aconc_state_werner(size_t d, double w, AconcState **out);

/*
 Maximally entangled state on d x d.
 */
AconcStatus aconc_state_max_entangled(size_t d, AconcState **out);

/*
 Haar-random pure state, deterministic for a fixed seed.
 */
AconcStatus aconc_state_random_pure(size_t dim_a, size_t dim_b, uint64_t seed, AconcState **out);

/*
 Releases a handle. Null is a no-op.
 */
void aconc_state_free(AconcState *handle);

/*
 0 for pure states, 1 for mixed states.
 */
AconcStatus aconc_state_kind(const AconcState *handle, int32_t *out);

/*
 Local dimensions of the state.
 */
AconcStatus aconc_state_dims(const AconcState *handle, size_t *dim_a, size_t *dim_b);

/*
 Exact alpha-concurrence of a pure state.
 */
AconcStatus aconc_alpha_concurrence_pure(const AconcState *handle, double alpha, double *out);

/*
 Squared Schmidt coefficients of a pure state, written into `buf`
 (capacity `cap`); `written` receives the rank.
 */
AconcStatus aconc_schmidt(const AconcState *handle, double *buf, size_t cap, size_t *written);

/*
 PPT/realignment lower bound on the alpha-concurrence of the state
 (pure states are bounded through their projector).
 */
AconcStatus aconc_lower_bound(const AconcState *handle, double alpha, AconcBoundReport *out);

/*
 Default options for [`aconc_roof_upper_bound`].
 */
AconcRoofOptions aconc_roof_options_default(void);

/*
 Upper bound on the alpha-concurrence by the decomposition search.
 Returns `NoConvergence` (with a valid `out`) when the search hit
 `max_iters` without stabilizing.
 */
AconcStatus aconc_roof_upper_bound(const AconcState *handle,
                                   double alpha,
                                   AconcRoofOptions options,
                                   double *out);

/*
 Dimension where the 1/2-concurrence overtakes the concurrence on
 isotropic states.
 */
double aconc_crossover_dimension(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACONC_H */
