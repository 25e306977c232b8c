#ifndef JSW_QUEUE_H
#define JSW_QUEUE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum JswStatus {
  JSW_STATUS_OK = 0,
  JSW_STATUS_NULL_POINTER = 1,
  JSW_STATUS_DOMAIN = 2,
  JSW_STATUS_PRECONDITION = 3,
  JSW_STATUS_CONFIG = 4,
  JSW_STATUS_INPUT = 5,
  JSW_STATUS_UNSTABLE = 6,
  JSW_STATUS_UTF8 = 7,
  JSW_STATUS_PANIC = 8,
} JswStatus;

// Stability classification of an input model for a given server count.
typedef enum JswStability {
  JSW_STABILITY_STABLE = 0,
  JSW_STABILITY_CRITICAL = 1,
  JSW_STABILITY_UNSTABLE = 2,
} JswStability;

// Opaque, immutable sequence of marks.
typedef struct JswMarks JswMarks;

// Opaque input model.
typedef struct JswModel JswModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *jsw_version(void);

// Message of the last failing call on this thread. Valid until the next
// failing call on this thread; empty if none failed yet.
const char *jsw_last_error_message(void);

// One step of the JSW recursion. `profile_in` and `out` hold `servers` doubles
// and may alias.
enum JswStatus jsw_kw_step(const double *profile_in,
                           size_t servers,
                           double sigma,
                           double xi,
                           double *out);

// One step of the rank-`rank` recursion; the arriving work joins the
// `rank`-th smallest workload (1-based).
enum JswStatus jsw_pth_step(const double *profile_in,
                            size_t servers,
                            double sigma,
                            double xi,
                            size_t rank,
                            double *out);

// Coordinatewise order `u ≺ v` on sorted profiles.
enum JswStatus jsw_prec(const double *u, const double *v, size_t len, double tol, bool *holds);

// Tail-sum order `u ≺_* v` on sorted profiles.
enum JswStatus jsw_prec_star(const double *u, const double *v, size_t len, double tol, bool *holds);

// Rank order `u ≺_P v`: tail sums plus coordinates from `rank` upward.
enum JswStatus jsw_prec_p(const double *u,
                          const double *v,
                          size_t len,
                          size_t rank,
                          double tol,
                          bool *holds);

// Builds a model from the `[model]` section of config text. Relative trace
// paths resolve against the working directory.
enum JswStatus jsw_model_from_config(const char *config, struct JswModel **out);

// Releases a model. Null is ignored.
void jsw_model_free(struct JswModel *model);

// Mean service requirement and mean inter-arrival time. `estimated` is set
// when a mean comes from a trace rather than a law.
enum JswStatus jsw_model_means(const struct JswModel *model,
                               double *mean_sigma,
                               double *mean_xi,
                               bool *estimated);

enum JswStatus jsw_model_stability(const struct JswModel *model,
                                   size_t servers,
                                   enum JswStability *out);

// Draws the first `length` marks of the model's stream for `seed`.
enum JswStatus jsw_marks_generate(const struct JswModel *model,
                                  uint64_t seed,
                                  size_t length,
                                  struct JswMarks **out);

// Builds a mark sequence from caller-supplied arrays of length `length`.
enum JswStatus jsw_marks_from_arrays(const double *sigma,
                                     const double *xi,
                                     size_t length,
                                     struct JswMarks **out);

// Number of marks; zero for a null handle.
size_t jsw_marks_len(const struct JswMarks *marks);

enum JswStatus jsw_marks_get(const struct JswMarks *marks, size_t index, double *sigma, double *xi);

// Releases a mark sequence. Null is ignored.
void jsw_marks_free(struct JswMarks *marks);

// Loynes estimate of the minimal stationary profile. Writes `servers`
// doubles to `profile_out`. Returns `JSW_STATUS_UNSTABLE` unless the model is
// strictly stable for `servers - rank + 1` servers.
enum JswStatus jsw_loynes_estimate(const struct JswModel *model,
                                   uint64_t seed,
                                   size_t servers,
                                   size_t rank,
                                   double tolerance,
                                   size_t window,
                                   size_t max_n,
                                   double *profile_out,
                                   size_t *steps_used,
                                   bool *converged);

// First-come-first-served waiting times of the `len(marks)` customers on
// `servers` servers, written to `waits_out`.
enum JswStatus jsw_fcfs_oracle(const struct JswMarks *marks, size_t servers, double *waits_out);

// Checks the pathwise comparison of `servers` against `fewer` JSW servers
// from empty, storing the number of violated inequalities.
enum JswStatus jsw_verify_fewer_servers(const struct JswMarks *marks,
                                        size_t servers,
                                        size_t fewer,
                                        size_t *violations);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JSW_QUEUE_H */
