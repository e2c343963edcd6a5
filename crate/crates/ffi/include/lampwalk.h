#ifndef LAMPWALK_H
#define LAMPWALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LwStatus {
  LW_STATUS_OK = 0,
  /**
   * Null pointer or string that is not UTF-8.
   */
  LW_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Input rejected by validation.
   */
  LW_STATUS_VALIDATION = 2,
  /**
   * A hypothesis certification failed.
   */
  LW_STATUS_HYPOTHESIS = 3,
  LW_STATUS_IO = 4,
  /**
   * A panic was caught at the boundary.
   */
  LW_STATUS_INTERNAL = 5,
} LwStatus;

/**
 * Opaque labelled digraph.
 */
typedef struct LwGraph LwGraph;

/**
 * Opaque transition kernel.
 */
typedef struct LwKernel LwKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *lw_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void lw_string_free(char *s);

/**
 * Parses a kernel from shorthand (`biased:0.7`, `srw:homtree:3`,
 * `sws:srw:z`, ...) or JSON.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum LwStatus lw_kernel_new(const char *spec, struct LwKernel **out);

/**
 * # Safety
 * `k` must be null or a handle from [`lw_kernel_new`], not yet freed.
 */
void lw_kernel_free(struct LwKernel *k);

/**
 * Spectral radius at the origin from return probabilities up to `n_max`
 * (even, at least 10).
 *
 * # Safety
 * `k` must be a live kernel handle; `rho` and `error_estimate` writable.
 */
enum LwStatus lw_spectral_radius(const struct LwKernel *k,
                                 size_t n_max,
                                 double *rho,
                                 double *error_estimate);

/**
 * Monte-Carlo rate of escape `E[d(X_0, X_n)]/n` in the graph metric of the
 * kernel's state space.
 *
 * # Safety
 * `k` must be a live kernel handle; `estimate` and `stderr` writable.
 */
enum LwStatus lw_rate_of_escape(const struct LwKernel *k,
                                uint64_t seed,
                                size_t horizon,
                                size_t trials,
                                size_t threads,
                                double *estimate,
                                double *stderr);

/**
 * Parses a labelled digraph from JSON
 * (`{"vertices": n, "alphabet": [...], "edges": [[s, "a", t], ...]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum LwStatus lw_graph_from_json(const char *json, struct LwGraph **out);

/**
 * Builds the Schreier graph of `group`/`subgroup` under the letter
 * assignment `psi` (see the CLI for the string syntax).
 *
 * # Safety
 * The strings must be NUL-terminated; `out` must be writable.
 */
enum LwStatus lw_schreier_build(const char *group,
                                const char *subgroup,
                                const char *psi,
                                size_t radius,
                                struct LwGraph **out);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
void lw_graph_free(struct LwGraph *g);

/**
 * Entropy `log ρ` of the path language from `x` to `y`.
 *
 * # Safety
 * `g` must be a live graph handle; `h` writable.
 */
enum LwStatus lw_entropy(const struct LwGraph *g, size_t x, size_t y, size_t n_max, double *h);

/**
 * Growth-sensitivity report for the comma-separated forbidden words, as JSON.
 *
 * # Safety
 * `g` must be a live graph handle, `forbid` NUL-terminated and `out`
 * writable. Free the result with [`lw_string_free`].
 */
enum LwStatus lw_growth_report_json(const struct LwGraph *g, const char *forbid, char **out);

/**
 * Runs an experiment manifest and returns the JSON summary.
 *
 * # Safety
 * `manifest` must be NUL-terminated and `out` writable. Free the result
 * with [`lw_string_free`].
 */
enum LwStatus lw_run_manifest(const char *manifest, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAMPWALK_H */
