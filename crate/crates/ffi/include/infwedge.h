#ifndef INFWEDGE_H
#define INFWEDGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status codes. 2, 3 and 4 match the command-line exit codes.
 */
typedef enum iw_status {
  IW_STATUS_OK = 0,
  IW_STATUS_PARSE = 2,
  IW_STATUS_DOMAIN = 3,
  IW_STATUS_NUMERIC = 4,
  IW_STATUS_NULL_POINTER = 5,
  IW_STATUS_BUFFER_TOO_SMALL = 6,
  IW_STATUS_PANIC = 7,
} iw_status;

/**
 * Opaque sampler handle.
 */
typedef struct iw_sampler iw_sampler;

/**
 * Opaque exact series handle.
 */
typedef struct iw_series iw_series;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *iw_last_error_message(void);

/**
 * `(x d/dx)^k Θ₁₁(x; q)`.
 */
enum iw_status iw_theta11(double x, double q, uint32_t k, double *out);

/**
 * `Θ₃(z; q)`.
 */
enum iw_status iw_theta3(double z, double q, double *out);

/**
 * n-point function by the theta-determinant formula.
 *
 * # Safety
 * `ts` must point to `n` doubles.
 */
enum iw_status iw_npoint_theta(const double *ts, size_t n, double q, double *out);

/**
 * n-point function by summation over partitions. `error_out` may be NULL.
 *
 * # Safety
 * `ts` must point to `n` doubles.
 */
enum iw_status iw_npoint_direct(const double *ts,
                                size_t n,
                                double q,
                                size_t cutoff,
                                double *out,
                                double *error_out);

/**
 * Frobenius correlation `ϱ(X, q)` by the contour integral; `q` in (0, 1).
 *
 * # Safety
 * `x_twice` must point to `n` values.
 */
enum iw_status iw_frobenius_corr(const int64_t *x_twice, size_t n, double q, double *out);

/**
 * Frobenius correlation by enumeration over `|λ| ≤ cutoff` (at most 80).
 *
 * # Safety
 * `x_twice` must point to `n` values.
 */
enum iw_status iw_frobenius_corr_enum(const int64_t *x_twice,
                                      size_t n,
                                      double q,
                                      size_t cutoff,
                                      double *out);

/**
 * Expected size `N(q)`.
 */
enum iw_status iw_expected_size(double q, double *out);

/**
 * `Π (1 + exp(π|ξ_i|/√6))^{-1}`.
 *
 * # Safety
 * `xis` must point to `n` doubles.
 */
enum iw_status iw_bulk_limit(const double *xis, size_t n, double *out);

/**
 * New sampler for the uniform measure at `q`; `tail_eps <= 0` selects the
 * default part cutoff.
 *
 * # Safety
 * `out` must be a valid pointer; free the handle with [`iw_sampler_free`].
 */
enum iw_status iw_sampler_new(double q, double tail_eps, uint64_t seed, struct iw_sampler **out);

/**
 * Draws the next partition into `parts[0..*len_out]`, largest part first.
 * If `capacity` is too small, returns `BufferTooSmall` with the needed
 * length in `*len_out` and keeps the sample for the next call.
 *
 * # Safety
 * `sampler` must come from [`iw_sampler_new`]; `parts` must hold `capacity`
 * values.
 */
enum iw_status iw_sampler_next(struct iw_sampler *sampler,
                               uint64_t *parts,
                               size_t capacity,
                               size_t *len_out);

/**
 * # Safety
 * `sampler` must come from [`iw_sampler_new`] and not be used afterwards.
 */
void iw_sampler_free(struct iw_sampler *sampler);

/**
 * `ρ(X)` for formal `t_1..t_kmax`, `t'_1..t'_kmax`, truncated at `order`.
 *
 * # Safety
 * `x_twice` must point to `n` values; free the result with [`iw_series_free`].
 */
enum iw_status iw_schur_correlation_symbolic(uint32_t kmax,
                                             uint32_t order,
                                             const int64_t *x_twice,
                                             size_t n,
                                             struct iw_series **out);

/**
 * `ρ(X)` for the Plancherel measure in `s = ξ^{1/2}`.
 *
 * # Safety
 * As for [`iw_schur_correlation_symbolic`].
 */
enum iw_status iw_schur_correlation_plancherel(uint32_t order,
                                               const int64_t *x_twice,
                                               size_t n,
                                               struct iw_series **out);

/**
 * Serializes a series as `{order, terms: [{exponents, num, den}]}`.
 *
 * # Safety
 * `series` must be a live handle; free the string with [`iw_string_free`].
 */
enum iw_status iw_series_to_json(const struct iw_series *series, char **out);

/**
 * # Safety
 * `series` must come from this library and not be used afterwards.
 */
void iw_series_free(struct iw_series *series);

/**
 * # Safety
 * `s` must come from [`iw_series_to_json`] and not be used afterwards.
 */
void iw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFWEDGE_H */
