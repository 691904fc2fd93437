#ifndef INVGEN_H
#define INVGEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum InvgenStatus {
  INVGEN_OK = 0,
  INVGEN_ERR_NULL = -1,
  INVGEN_ERR_DOMAIN = -2,
  INVGEN_ERR_CONVERGENCE = -3,
  INVGEN_ERR_CONFIG = -4,
  INVGEN_ERR_IO = -5,
  INVGEN_ERR_PANIC = -6,
} InvgenStatus;

/**
 * A Fourier multiplier symbol.
 */
typedef struct InvgenMultiplier InvgenMultiplier;

/**
 * A sampled complex signal on a uniform grid.
 */
typedef struct InvgenSignal InvgenSignal;

/**
 * The records of a blow-up sweep.
 */
typedef struct InvgenSweep InvgenSweep;

/**
 * One row of a blow-up sweep.
 */
typedef struct InvgenRecord {
  double rho;
  double p;
  double a;
  double b;
  double norm_f_i;
  double norm_tmf_i;
  double ratio;
  double emp_m;
  bool flagged;
} InvgenRecord;

/**
 * Least-squares fit of `ln ratio` against `ln rho`.
 */
typedef struct InvgenFit {
  double p;
  double slope;
  double intercept;
  double r_squared;
  double predicted_slope;
} InvgenFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty if none. Valid until the next failing call.
 */
const char *invgen_last_error(void);

/**
 * Bessel function `J_1(x)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_bessel_j1(double x, double *out);

/**
 * `sin(πx)/(πx)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_sinc(double x, double *out);

/**
 * Bessel kernel `b_t(s)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_kernel_b(double t, double s, double *out);

/**
 * `∫_0^∞ b_t(s) e^{-εs} ds` by quadrature.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_kernel_laplace(double t, double eps, double tol, double *out);

/**
 * `N_p = ‖sinc‖_p`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_compute_np(double p, double *out);

/**
 * `‖f_I‖_p` for `I = [a, b]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_norm_f_i(double a, double b, double p, double *out);

/**
 * `‖T_m f_I‖_p` for `m = e^{it/ξ}`, `I = [a, b] ⊂ (0, ∞)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_norm_tmf_i(double a,
                                    double b,
                                    double t,
                                    double p,
                                    double tol,
                                    double *out);

/**
 * `sup_y |(T_m f_I)(y)|`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_sup_g(double a, double b, double t, double *out);

/**
 * New signal on the grid `x_j = -half_width + j·2·half_width/n`; `im` may be null.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `n` readable doubles; `out` must be valid for writes.
 */
enum InvgenStatus invgen_signal_new(double half_width,
                                    size_t n,
                                    const double *re,
                                    const double *im,
                                    struct InvgenSignal **out);

/**
 * Release a signal; null is ignored.
 *
 * # Safety
 * `sig` must come from this library and not be used afterwards.
 */
void invgen_signal_free(struct InvgenSignal *sig);

/**
 * Number of samples, 0 for null.
 *
 * # Safety
 * `sig` must be null or a live handle.
 */
size_t invgen_signal_len(const struct InvgenSignal *sig);

/**
 * Grid half-width and spacing.
 *
 * # Safety
 * `sig` must be a live handle; `half_width` and `spacing` must be valid for writes.
 */
enum InvgenStatus invgen_signal_grid(const struct InvgenSignal *sig,
                                     double *half_width,
                                     double *spacing);

/**
 * Copy the samples into `re` and `im`, each of length `len` (must equal the signal length).
 *
 * # Safety
 * `sig` must be a live handle; `re` and `im` must point to `len` writable doubles.
 */
enum InvgenStatus invgen_signal_samples(const struct InvgenSignal *sig,
                                        double *re,
                                        double *im,
                                        size_t len);

/**
 * Rectangle-rule `L^p` norm.
 *
 * # Safety
 * `sig` must be a live handle; `out` must be valid for writes.
 */
enum InvgenStatus invgen_signal_lp_norm(const struct InvgenSignal *sig, double p, double *out);

/**
 * Continuous Fourier transform on the dual grid; the result is a new handle.
 *
 * # Safety
 * `sig` must be a live handle; `out` must be valid for writes.
 */
enum InvgenStatus invgen_forward_ft(const struct InvgenSignal *sig, struct InvgenSignal **out);

/**
 * Inverse of [`invgen_forward_ft`].
 *
 * # Safety
 * `sig` must be a live handle; `out` must be valid for writes.
 */
enum InvgenStatus invgen_inverse_ft(const struct InvgenSignal *sig, struct InvgenSignal **out);

/**
 * `ξ ↦ e^{it/ξ}` (value 1 at 0).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_multiplier_osc(double t, struct InvgenMultiplier **out);

/**
 * `ξ ↦ exp(t/(-ε - 2πiξ))`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_multiplier_semigroup(double t, double eps, struct InvgenMultiplier **out);

/**
 * `ξ ↦ conj m(ξ)`.
 *
 * # Safety
 * `m` must be a live handle; `out` must be valid for writes.
 */
enum InvgenStatus invgen_multiplier_adjoint(const struct InvgenMultiplier *m,
                                            struct InvgenMultiplier **out);

/**
 * `ξ ↦ m(-ξ)`.
 *
 * # Safety
 * `m` must be a live handle; `out` must be valid for writes.
 */
enum InvgenStatus invgen_multiplier_reflect(const struct InvgenMultiplier *m,
                                            struct InvgenMultiplier **out);

/**
 * Evaluate the symbol (conventions applied).
 *
 * # Safety
 * `m` must be a live handle; `re` and `im` must be valid for writes.
 */
enum InvgenStatus invgen_multiplier_eval(const struct InvgenMultiplier *m,
                                         double xi,
                                         double *re,
                                         double *im);

/**
 * Release a multiplier; null is ignored.
 *
 * # Safety
 * `m` must come from this library and not be used afterwards.
 */
void invgen_multiplier_free(struct InvgenMultiplier *m);

/**
 * `F^{-1}(m · Ff)` as a new signal.
 *
 * # Safety
 * `m` and `sig` must be live handles; `out` must be valid for writes.
 */
enum InvgenStatus invgen_apply_multiplier(const struct InvgenMultiplier *m,
                                          const struct InvgenSignal *sig,
                                          struct InvgenSignal **out);

/**
 * Lower bound on the `p → p` norm of the grid operator of `m` on an `n`-point grid.
 *
 * # Safety
 * `m` must be a live handle; `out` must be valid for writes.
 */
enum InvgenStatus invgen_estimate_discrete_norm(const struct InvgenMultiplier *m,
                                                double half_width,
                                                size_t n,
                                                double p,
                                                size_t budget,
                                                uint64_t seed,
                                                double *out);

/**
 * Run the blow-up sweep over `rho ∈ [rho_min, rho_max]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum InvgenStatus invgen_blowup_sweep(double p,
                                      double rho_min,
                                      double rho_max,
                                      size_t points_per_decade,
                                      double t,
                                      double tol,
                                      struct InvgenSweep **out);

/**
 * Number of records, 0 for null.
 *
 * # Safety
 * `sweep` must be null or a live handle.
 */
size_t invgen_sweep_len(const struct InvgenSweep *sweep);

/**
 * Copy record `index`.
 *
 * # Safety
 * `sweep` must be a live handle; `out` must be valid for writes.
 */
enum InvgenStatus invgen_sweep_record(const struct InvgenSweep *sweep,
                                      size_t index,
                                      struct InvgenRecord *out);

/**
 * Log-log fit of the sweep.
 *
 * # Safety
 * `sweep` must be a live handle; `out` must be valid for writes.
 */
enum InvgenStatus invgen_sweep_fit(const struct InvgenSweep *sweep, struct InvgenFit *out);

/**
 * Release a sweep; null is ignored.
 *
 * # Safety
 * `sweep` must come from this library and not be used afterwards.
 */
void invgen_sweep_free(struct InvgenSweep *sweep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVGEN_H */
