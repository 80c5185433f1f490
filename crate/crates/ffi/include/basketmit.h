#ifndef BASKETMIT_H
#define BASKETMIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum BmStatus {
  BM_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  BM_STATUS_NULL_POINTER = 1,
  /**
   * Arguments were rejected.
   */
  BM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation ended in a protocol or estimation abort.
   */
  BM_STATUS_ABORT = 3,
  /**
   * File, parse or simulation failure.
   */
  BM_STATUS_FAILED = 4,
  /**
   * A panic was caught.
   */
  BM_STATUS_PANIC = 5,
} BmStatus;

/**
 * Protocol verdict.
 */
typedef enum BmVerdict {
  BM_VERDICT_FALSE = 0,
  BM_VERDICT_TRUE = 1,
  BM_VERDICT_ABORTED = 2,
} BmVerdict;

/**
 * A loaded experiment config.
 */
typedef struct BmExperiment BmExperiment;

/**
 * The outcome of a protocol run.
 */
typedef struct BmOutcome BmOutcome;

/**
 * The optimum returned by the estimator.
 */
typedef struct BmEstimate {
  uint64_t n;
  double eps_max;
  double eps_ver;
  double eps_rej;
  double phi;
  double tau;
} BmEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL,
 * or 0 when there is none.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t bm_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bm_version(void);

/**
 * Minimises ε_max at fixed `n`. Pass `tau = NaN` to optimise τ.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `BmEstimate`.
 */
enum BmStatus bm_estimate_eps(uint32_t k,
                              double p,
                              double p_max,
                              uint64_t n,
                              double tau,
                              struct BmEstimate *out);

/**
 * Smallest `n` with ε_max ≤ `eps_target`. Pass `tau = NaN` to optimise τ.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `BmEstimate`.
 */
enum BmStatus bm_estimate_n(uint32_t k,
                            double p,
                            double p_max,
                            double eps_target,
                            double tau,
                            struct BmEstimate *out);

/**
 * Bayesian combination from the uniform prior: basket `j` voted `votes[j]`
 * with bound `eps[j]`. Writes the posterior probability of outcome 1.
 *
 * # Safety
 * `eps` and `votes` must be valid for `len` elements; `p1` must be writable.
 */
enum BmStatus bm_combine(const double *eps, const uint8_t *votes, size_t len, double *p1);

/**
 * Loads an experiment config file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum BmStatus bm_experiment_load(const char *path, struct BmExperiment **out);

/**
 * # Safety
 * `exp` must be null or a handle from [`bm_experiment_load`], not yet freed.
 */
void bm_experiment_free(struct BmExperiment *exp);

/**
 * Overrides the experiment's master seed (and the walk seed).
 *
 * # Safety
 * `exp` must be a live handle.
 */
enum BmStatus bm_experiment_set_seed(struct BmExperiment *exp, uint64_t seed);

/**
 * Simulates and analyses the experiment end to end. A protocol abort is
 * still `BM_STATUS_OK` with an outcome whose verdict is `Aborted`.
 *
 * # Safety
 * `exp` must be a live handle; `out` must be writable.
 */
enum BmStatus bm_protocol_run(const struct BmExperiment *exp, struct BmOutcome **out);

/**
 * # Safety
 * `outcome` must be null or a handle from [`bm_protocol_run`], not yet freed.
 */
void bm_outcome_free(struct BmOutcome *outcome);

/**
 * Verdict and confidence (NaN on abort).
 *
 * # Safety
 * `outcome` must be a live handle; the out pointers must be writable.
 */
enum BmStatus bm_outcome_verdict(const struct BmOutcome *outcome,
                                 enum BmVerdict *verdict,
                                 double *confidence);

/**
 * Number of baskets found over all repetitions.
 *
 * # Safety
 * `outcome` must be a live handle; `count` must be writable.
 */
enum BmStatus bm_outcome_basket_count(const struct BmOutcome *outcome, size_t *count);

/**
 * The full outcome as JSON. Release with [`bm_string_free`].
 *
 * # Safety
 * `outcome` must be a live handle; `out` must be writable.
 */
enum BmStatus bm_outcome_json(const struct BmOutcome *outcome, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void bm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BASKETMIT_H */
