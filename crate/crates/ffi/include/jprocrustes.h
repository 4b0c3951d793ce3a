#ifndef JPROCRUSTES_H
#define JPROCRUSTES_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call. The numeric values match the CLI exit codes where
 * the two overlap.
 */
typedef enum JpStatus {
  JP_STATUS_OK = 0,
  JP_STATUS_INVALID_INPUT = 1,
  JP_STATUS_INFEASIBLE = 2,
  JP_STATUS_NUMERICAL = 3,
  JP_STATUS_NULL_POINTER = 4,
  JP_STATUS_BUFFER_TOO_SMALL = 5,
  JP_STATUS_PANIC = 6,
} JpStatus;

/**
 * Structure class of the sought matrix.
 */
typedef enum JpMode {
  JP_MODE_HAMILTONIAN = 0,
  JP_MODE_SKEW_HAMILTONIAN = 1,
  JP_MODE_SYMPLECTIC = 2,
} JpMode;

/**
 * A validated problem instance.
 */
typedef struct JpProblem JpProblem;

/**
 * The outcome of a solve: a solution or an infeasibility report.
 */
typedef struct JpSolution JpSolution;

/**
 * A complex number as two doubles.
 */
typedef struct JpComplex {
  double re;
  double im;
} JpComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a problem from row-major matrices.
 *
 * `mode` is a `JpMode` value. `j` and `a_tilde` are `n x n`, `x` is
 * `n x m` and `d_diag` holds the `m` diagonal entries of D. Default
 * tolerances apply.
 *
 * # Safety
 * Each pointer must reference an array of the stated length and `out`
 * must be writable.
 */
enum JpStatus jp_problem_new(uint32_t mode,
                             size_t n,
                             size_t m,
                             const struct JpComplex *j,
                             const struct JpComplex *x,
                             const struct JpComplex *d_diag,
                             const struct JpComplex *a_tilde,
                             struct JpProblem **out);

/**
 * Parses a problem document (the CLI input format).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum JpStatus jp_problem_from_json(const char *json, struct JpProblem **out);

/**
 * Replaces the problem's tolerances.
 *
 * # Safety
 * `problem` must come from this library and not have been freed.
 */
enum JpStatus jp_problem_set_tolerance(struct JpProblem *problem,
                                       double rank_cutoff,
                                       double structure_atol);

/**
 * Requests an optimality audit with `samples` oracle draws when solving.
 *
 * # Safety
 * `problem` must come from this library and not have been freed.
 */
enum JpStatus jp_problem_set_audit(struct JpProblem *problem, size_t samples, uint64_t seed);

/**
 * # Safety
 * `problem` must be NULL or come from this library, freed at most once.
 */
void jp_problem_free(struct JpProblem *problem);

/**
 * Solves the problem. Returns `Ok` with a solution or `Infeasible` with a
 * report; in both cases `*out` receives a handle.
 *
 * # Safety
 * `problem` must be a live handle and `out` writable.
 */
enum JpStatus jp_solve(const struct JpProblem *problem, struct JpSolution **out);

/**
 * Order n of the solution matrix; 0 when infeasible or `solution` is NULL.
 *
 * # Safety
 * `solution` must be NULL or a live handle.
 */
size_t jp_solution_dim(const struct JpSolution *solution);

/**
 * Copies the optimal matrix, row-major, into `buf` (at least n*n entries).
 *
 * # Safety
 * `solution` must be a live handle and `buf` must hold `len` entries.
 */
enum JpStatus jp_solution_a_hat(const struct JpSolution *solution,
                                struct JpComplex *buf,
                                size_t len);

/**
 * Writes `||At - A_hat||_F`.
 *
 * # Safety
 * `solution` must be a live handle and `out` writable.
 */
enum JpStatus jp_solution_residual(const struct JpSolution *solution, double *out);

/**
 * Step number at which feasibility failed, or 0 for a solution.
 *
 * # Safety
 * `solution` must be NULL or a live handle.
 */
uint32_t jp_solution_failed_step(const struct JpSolution *solution);

/**
 * The full report document as JSON. Release it with [`jp_string_free`].
 * Returns NULL if `solution` is NULL.
 *
 * # Safety
 * `solution` must be NULL or a live handle.
 */
char *jp_solution_report_json(const struct JpSolution *solution);

/**
 * # Safety
 * `solution` must be NULL or come from this library, freed at most once.
 */
void jp_solution_free(struct JpSolution *solution);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed at most
 * once.
 */
void jp_string_free(char *s);

/**
 * Message for the last failed call on this thread; empty after a
 * successful one. Valid until the next call into the library from the
 * same thread.
 */
const char *jp_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JPROCRUSTES_H */
