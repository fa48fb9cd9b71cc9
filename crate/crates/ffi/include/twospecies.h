#ifndef TWOSPECIES_H
#define TWOSPECIES_H

/* Generated by cbindgen from twospecies-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum TsStatus {
  TS_STATUS_OK = 0,
  /**
   * An argument lies outside the mathematical domain of the operation.
   */
  TS_STATUS_DOMAIN = 1,
  /**
   * Structurally inconsistent inputs (mismatched grids, bad parameters).
   */
  TS_STATUS_CONFIG = 2,
  /**
   * Degenerate input (zero species-2 mass, kernel mass at the origin).
   */
  TS_STATUS_DEGENERATE = 3,
  /**
   * The discretization cannot step without exhausting species 2.
   */
  TS_STATUS_HORIZON_EXHAUSTED = 4,
  /**
   * Evaluation requested at or beyond the solution horizon.
   */
  TS_STATUS_OUT_OF_HORIZON = 5,
  TS_STATUS_IO = 6,
  TS_STATUS_NULL_ARGUMENT = 7,
} TsStatus;

/**
 * Opaque handle over a nonnegative density sampled on a uniform grid.
 */
typedef struct TsGridDensity TsGridDensity;

/**
 * Opaque handle over a solved kinetic system.
 */
typedef struct TsKineticSolution TsKineticSolution;

/**
 * Opaque handle over an event-driven particle system.
 */
typedef struct TsPdmp TsPdmp;

/**
 * Opaque handle over the deterministic bin-discretization state.
 */
typedef struct TsScheme TsScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the most recent failure on this thread into `buf`
 * (NUL-terminated, truncated to `cap`). Returns the untruncated length.
 *
 * # Safety
 * `buf` must point to at least `cap` writable bytes, or be null (in which
 * case only the length is returned).
 */
uintptr_t ts_last_error_message(char *buf, uintptr_t cap);

/**
 * Builds a grid density from `len` node values spaced `step` apart.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be a valid
 * destination pointer.
 */
enum TsStatus ts_grid_new(double step,
                          const double *values,
                          uintptr_t len,
                          struct TsGridDensity **out);

/**
 * # Safety
 * `g` must be a handle from [`ts_grid_new`] not yet freed, or null.
 */
void ts_grid_free(struct TsGridDensity *g);

/**
 * Total mass (trapezoid integral); NaN on a null handle.
 *
 * # Safety
 * `g` must be a live handle or null.
 */
double ts_grid_mass(const struct TsGridDensity *g);

/**
 * Cumulative `F(x)`.
 *
 * # Safety
 * `g` must be a live handle; `out` a valid destination.
 */
enum TsStatus ts_grid_cumulative(const struct TsGridDensity *g, double x, double *out);

/**
 * Quantile `inf{x : F(x) >= q}`.
 *
 * # Safety
 * `g` must be a live handle; `out` a valid destination.
 */
enum TsStatus ts_grid_quantile(const struct TsGridDensity *g, double q, double *out);

/**
 * Kolmogorov-Smirnov distance between two grid densities.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` a valid destination.
 */
enum TsStatus ts_ks_distance_grid(const struct TsGridDensity *a,
                                  const struct TsGridDensity *b,
                                  double *out);

/**
 * Solves the kinetic equations on `[0, t_max]` with series tolerance `tol`.
 * Pass a negative `n2_floor` for the default `1e-3 * N2(0)`.
 *
 * # Safety
 * `f1` and `f2` must be live grid handles; `out` a valid destination.
 */
enum TsStatus ts_solution_solve(const struct TsGridDensity *f1,
                                const struct TsGridDensity *f2,
                                double t_max,
                                double tol,
                                double n2_floor,
                                struct TsKineticSolution **out);

/**
 * # Safety
 * `s` must be a handle from [`ts_solution_solve`] not yet freed, or null.
 */
void ts_solution_free(struct TsKineticSolution *s);

/**
 * Removal rate `a(t)` by linear interpolation on the stored grid.
 *
 * # Safety
 * `s` must be a live handle; `out` a valid destination.
 */
enum TsStatus ts_solution_removal_rate_at(const struct TsKineticSolution *s, double t, double *out);

/**
 * `N2(t) = N2(0) - L(t)`.
 *
 * # Safety
 * `s` must be a live handle; `out` a valid destination.
 */
enum TsStatus ts_solution_n2_at(const struct TsKineticSolution *s, double t, double *out);

/**
 * Largest time at which the evaluators remain valid; NaN on null.
 *
 * # Safety
 * `s` must be a live handle or null.
 */
double ts_solution_horizon(const struct TsKineticSolution *s);

/**
 * First time `N2` reaches `floor` (end of grid if never); NaN on null.
 *
 * # Safety
 * `s` must be a live handle or null.
 */
double ts_solution_blowup_time(const struct TsKineticSolution *s, double floor);

/**
 * Max-norm residual of the renewal equation, the solver's independent
 * consistency check; NaN on null.
 *
 * # Safety
 * `s` must be a live handle or null.
 */
double ts_solution_renewal_residual(const struct TsKineticSolution *s);

/**
 * Initializes the bin discretization with width `delta` from a normalized
 * density pair.
 *
 * # Safety
 * `f1` and `f2` must be live grid handles; `out` a valid destination.
 */
enum TsStatus ts_scheme_new(const struct TsGridDensity *f1,
                            const struct TsGridDensity *f2,
                            double delta,
                            struct TsScheme **out);

/**
 * # Safety
 * `s` must be a handle from [`ts_scheme_new`] not yet freed, or null.
 */
void ts_scheme_free(struct TsScheme *s);

/**
 * Advances the discretization by one time step of size `delta`.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum TsStatus ts_scheme_step(struct TsScheme *s);

/**
 * Step index `k` (the state covers times in `[k*delta, (k+1)*delta)`).
 *
 * # Safety
 * `s` must be a live handle or null.
 */
uintptr_t ts_scheme_step_index(const struct TsScheme *s);

/**
 * Species-2 total at the current step; NaN on null.
 *
 * # Safety
 * `s` must be a live handle or null.
 */
double ts_scheme_n2(const struct TsScheme *s);

/**
 * Copies the bin masses of species 1 (`species = 1`) or species 2 into
 * `buf`, writing at most `cap` values; `written` receives the bin count.
 *
 * # Safety
 * `buf` must point to `cap` writable doubles; `written` must be valid.
 */
enum TsStatus ts_scheme_bin_masses(const struct TsScheme *s,
                                   uint32_t species,
                                   double *buf,
                                   uintptr_t cap,
                                   uintptr_t *written);

/**
 * Builds an n-particle system by deterministic quantile placement with the
 * ChaCha stream `(master_seed, stream)`.
 *
 * # Safety
 * `f1` and `f2` must be live grid handles; `out` a valid destination.
 */
enum TsStatus ts_pdmp_new(const struct TsGridDensity *f1,
                          const struct TsGridDensity *f2,
                          uintptr_t n,
                          uint64_t master_seed,
                          uint64_t stream,
                          struct TsPdmp **out);

/**
 * # Safety
 * `p` must be a handle from [`ts_pdmp_new`] not yet freed, or null.
 */
void ts_pdmp_free(struct TsPdmp *p);

/**
 * Applies every event with time `<= t`.
 *
 * # Safety
 * `p` must be a live handle.
 */
enum TsStatus ts_pdmp_advance_to(struct TsPdmp *p, double t);

/**
 * Elapsed time; NaN on null.
 *
 * # Safety
 * `p` must be a live handle or null.
 */
double ts_pdmp_time(const struct TsPdmp *p);

/**
 * Number of removals so far.
 *
 * # Safety
 * `p` must be a live handle or null.
 */
uintptr_t ts_pdmp_removal_count(const struct TsPdmp *p);

/**
 * Species counts.
 *
 * # Safety
 * `p` must be a live handle; `s1` and `s2` valid destinations.
 */
enum TsStatus ts_pdmp_counts(const struct TsPdmp *p, uintptr_t *s1, uintptr_t *s2);

/**
 * Whether the process has reached its cemetery state.
 *
 * # Safety
 * `p` must be a live handle or null.
 */
bool ts_pdmp_is_cemetery(const struct TsPdmp *p);

/**
 * Normalized loss `L^n(t)` for `t` at or before the current time.
 *
 * # Safety
 * `p` must be a live handle; `out` a valid destination.
 */
enum TsStatus ts_pdmp_loss_at(const struct TsPdmp *p, double t, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TWOSPECIES_H */
