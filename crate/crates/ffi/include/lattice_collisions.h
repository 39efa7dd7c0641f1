#ifndef LATTICE_COLLISIONS_H
#define LATTICE_COLLISIONS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum LcStatus {
  LC_STATUS_OK = 0,
  // A required pointer argument was null.
  LC_STATUS_NULL_POINTER = 1,
  // An argument was out of range.
  LC_STATUS_INVALID_INPUT = 2,
  // A quadrature budget, evaluation or fit-quality check failed.
  LC_STATUS_NUMERICAL = 3,
  // The library panicked; this is a bug.
  LC_STATUS_INTERNAL = 4,
} LcStatus;

typedef enum LcGrowth {
  LC_GROWTH_SQRT = 0,
  LC_GROWTH_LOG = 1,
  LC_GROWTH_CONVERGENT = 2,
} LcGrowth;

typedef enum LcMode {
  LC_MODE_DISCRETE = 0,
  LC_MODE_CONTINUOUS = 1,
} LcMode;

// Opaque handle to a leading-constant fit.
typedef struct LcFit LcFit;

// Opaque handle to a Monte Carlo configuration.
typedef struct LcMonteCarlo LcMonteCarlo;

// Outcome of [`lc_classify`].
typedef struct LcClassification {
  bool finite;
  enum LcGrowth growth;
  // Mean log₁₀ ratio of consecutive window increments.
  double decade_exponent;
  // Whether the numerical diagnostic agrees with the integral test.
  bool consistent;
} LcClassification;

// A Monte Carlo mean with its standard error.
typedef struct LcEstimate {
  double mean;
  // Standard error of `mean`.
  double std_error;
  uint64_t trials;
  uint64_t seed;
} LcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null if none. The pointer
// stays valid until the next failing call on the same thread.
const char *lc_last_error_message(void);

// `e^{-z} I₀(z)`. `out_err_bound` may be null.
//
// # Safety
// `out_value` must be valid for writes; `out_err_bound` must be null or valid
// for writes.
enum LcStatus lc_i0_scaled(double z, double *out_value, double *out_err_bound);

// `P(D_j(t) = 0)` for one coordinate in dimension `d`.
//
// # Safety
// `out_p` must be valid for writes.
enum LcStatus lc_coordinate_return_prob(double t, uint32_t d, double *out_p);

// `P(D(t) = 0)` in dimension `d`, with its natural logarithm, which stays
// finite when the probability underflows. `out_log_p` may be null.
//
// # Safety
// `out_p` must be valid for writes; `out_log_p` must be null or valid for
// writes.
enum LcStatus lc_collision_prob(double t, uint32_t d, double *out_p, double *out_log_p);

// `∫₀^{t_max} P(D(t) = 0) dt` into `out_value`. For `d ≥ 3` the integral
// to infinity goes to `out_total`; otherwise `out_total` receives +∞.
// `out_err_estimate` and `out_total` may be null.
//
// # Safety
// `out_value` must be valid for writes; the other out-pointers must be null
// or valid for writes.
enum LcStatus lc_expected_occupation(uint32_t d,
                                     double t_max,
                                     double *out_value,
                                     double *out_err_estimate,
                                     double *out_total);

// Whether two walkers in dimension `d` meet finitely often in expectation.
//
// # Safety
// `out` must be valid for writes.
enum LcStatus lc_classify(uint32_t d, struct LcClassification *out);

// Fits `lim t^{d/2} P(D(t) = 0)` on the default grid up to `t_max ≥ 1e4`.
// On success `*out_fit` owns a handle to release with [`lc_fit_free`].
//
// # Safety
// `out_fit` must be valid for writes.
enum LcStatus lc_fit_new(uint32_t d, double t_max, struct LcFit **out_fit);

// Releases a fit handle. Null is ignored.
//
// # Safety
// `fit` must be null or a handle from [`lc_fit_new`] not yet freed.
void lc_fit_free(struct LcFit *fit);

// Extrapolated leading constant. NaN for a null handle.
//
// # Safety
// `fit` must be null or a live handle from [`lc_fit_new`].
double lc_fit_constant_estimate(const struct LcFit *fit);

// `(d/π)^{d/2}`. NaN for a null handle.
//
// # Safety
// `fit` must be null or a live handle from [`lc_fit_new`].
double lc_fit_paper_constant(const struct LcFit *fit);

// `(d/(4π))^{d/2}`. NaN for a null handle.
//
// # Safety
// `fit` must be null or a live handle from [`lc_fit_new`].
double lc_fit_derived_constant(const struct LcFit *fit);

// Estimate divided by `(d/π)^{d/2}`. NaN for a null handle.
//
// # Safety
// `fit` must be null or a live handle from [`lc_fit_new`].
double lc_fit_ratio_to_paper(const struct LcFit *fit);

// Estimate divided by `(d/(4π))^{d/2}`. NaN for a null handle.
//
// # Safety
// `fit` must be null or a live handle from [`lc_fit_new`].
double lc_fit_ratio_to_derived(const struct LcFit *fit);

// Number of grid points in the fit; 0 for a null handle.
//
// # Safety
// `fit` must be null or a live handle from [`lc_fit_new`].
size_t lc_fit_grid_len(const struct LcFit *fit);

// Grid point `index` and the scaled probability `t^{d/2} P(D(t) = 0)` there.
//
// # Safety
// `fit` must be null or a live handle; `out_t` and `out_g` must be valid for
// writes.
enum LcStatus lc_fit_point(const struct LcFit *fit, size_t index, double *out_t, double *out_g);

// Monte Carlo configuration. Results depend only on `trials` and `seed`;
// `workers` sets parallelism. Release with [`lc_mc_free`].
//
// # Safety
// `out_mc` must be valid for writes.
enum LcStatus lc_mc_new(uint64_t trials,
                        uint64_t seed,
                        uint32_t workers,
                        struct LcMonteCarlo **out_mc);

// Releases a Monte Carlo handle. Null is ignored.
//
// # Safety
// `mc` must be null or a handle from [`lc_mc_new`] not yet freed.
void lc_mc_free(struct LcMonteCarlo *mc);

// Fraction of continuous-time pairs together at time `t`.
//
// # Safety
// `mc` must be a live handle; `out` must be valid for writes.
enum LcStatus lc_mc_collision_prob(const struct LcMonteCarlo *mc,
                                   uint32_t d,
                                   double t,
                                   struct LcEstimate *out);

// Mean number of collisions up to `horizon` (steps in discrete mode, time in
// continuous mode), counting the start.
//
// # Safety
// `mc` must be a live handle; `out` must be valid for writes.
enum LcStatus lc_mc_expected_count(const struct LcMonteCarlo *mc,
                                   uint32_t d,
                                   enum LcMode mode,
                                   double horizon,
                                   struct LcEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LATTICE_COLLISIONS_H */
