#ifndef TFD_FFI_H
#define TFD_FFI_H

/* Generated by cbindgen from the tfd-ffi sources. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
enum TfdStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  TFD_STATUS_OK = 0,
  TFD_STATUS_NULL_POINTER = 1,
  TFD_STATUS_INVALID_ARGUMENT = 2,
  TFD_STATUS_NUMERICAL = 3,
  TFD_STATUS_IO = 4,
  /**
   * A scenario ran but at least one check failed.
   */
  TFD_STATUS_CHECK_FAILED = 5,
  TFD_STATUS_PANIC = 6,
};
#ifndef __cplusplus
typedef int32_t TfdStatus;
#endif // __cplusplus

/**
 * Truncated Liouville space.
 */
typedef struct TfdBasis TfdBasis;

/**
 * Two-body interaction with its coupling.
 */
typedef struct TfdModel TfdModel;

/**
 * One vertex entry V_{jklm}.
 */
typedef struct TfdChannel {
  size_t j;
  size_t k;
  size_t l;
  size_t m;
  double v_re;
  double v_im;
} TfdChannel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length, or 0 without error.
 */
size_t tfd_last_error(char *buf, size_t len);

/**
 * Creates a basis of `n_modes` modes. `sigma[j]` is +1 or −1; `cutoff[j]`
 * is ignored for fermions.
 */
int32_t tfd_basis_new(const int32_t *sigma,
                      const double *omega,
                      const size_t *cutoff,
                      size_t n_modes,
                      struct TfdBasis **out_basis);

void tfd_basis_free(struct TfdBasis *basis);

/**
 * Liouville dimension (dim_h²).
 */
int32_t tfd_basis_dim(const struct TfdBasis *basis, size_t *out_dim);

/**
 * Runs the algebra identity sweep; writes the largest residual and the
 * number of failed checks.
 */
int32_t tfd_verify_algebra(const struct TfdBasis *basis,
                           uint64_t seed,
                           double tol,
                           double *out_max_residual,
                           size_t *out_failed);

/**
 * Builds an interaction from vertex entries; `sigma` gives the statistics
 * of each mode.
 */
int32_t tfd_model_new(double lambda,
                      const int32_t *sigma,
                      size_t n_modes,
                      const struct TfdChannel *channels,
                      size_t n_channels,
                      struct TfdModel **out_model);

/**
 * Three bosons with the single channel V₀₂₁₁ = 1.
 */
int32_t tfd_model_ladder(double lambda, struct TfdModel **out_model);

void tfd_model_free(struct TfdModel *model);

int32_t tfd_model_n_modes(const struct TfdModel *model, size_t *out_n);

/**
 * Δ(t₁,t₂) for one mode at constant occupation and energy, row-major as
 * (re, im) pairs: out[8] = {Δ¹¹, Δ¹², Δ²¹, Δ²²}.
 */
int32_t tfd_propagator_delta(int32_t sigma,
                             double n,
                             double omega,
                             double t1,
                             double t2,
                             double *out_values);

/**
 * Markovian relaxation of the occupations to `t_end`. Writes the final
 * occupations and the distance to the fitted equilibrium. A `broadening`
 * ≤ 0 selects the default width.
 */
int32_t tfd_transport_relax(const struct TfdModel *model,
                            const double *n0,
                            const double *omega,
                            size_t n_modes,
                            double t_end,
                            double dt,
                            double broadening,
                            double *out_n,
                            double *out_gap);

/**
 * Self-consistent on-shell energies at inverse temperature β.
 */
int32_t tfd_equilibrium_renormalize(const struct TfdModel *model,
                                    const double *omega0,
                                    size_t n_modes,
                                    double beta,
                                    double width,
                                    double *out_omega);

/**
 * Runs a scenario like the command-line tool. `kind` is one of
 * "verify-algebra", "evolve", "propagators", "transport",
 * "renorm-compare". A negative `seed` keeps the config seed. Returns
 * `CHECK_FAILED` when the run completed with failing checks.
 */
int32_t tfd_run_scenario(const char *kind, const char *config, const char *out_dir, int64_t seed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFD_FFI_H */
