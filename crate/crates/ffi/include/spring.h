#ifndef SPRING_H
#define SPRING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpringStatus {
  SPRING_STATUS_OK = 0,
  SPRING_STATUS_INVALID_INPUT = 2,
  SPRING_STATUS_NUMERICAL = 3,
  SPRING_STATUS_IO = 4,
  SPRING_STATUS_NULL_POINTER = 5,
  SPRING_STATUS_PANIC = 6,
} SpringStatus;

/**
 * Opaque fitted model handle.
 */
typedef struct SpringFitHandle SpringFitHandle;

/**
 * Opaque structure matrix handle.
 */
typedef struct SpringStructure SpringStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * p×p identity structure.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SpringStatus spring_structure_identity(size_t p, struct SpringStructure **out);

/**
 * Chain-graph Laplacian of the given order on p predictors.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SpringStatus spring_structure_chain(size_t p, uint32_t order, struct SpringStructure **out);

/**
 * Hamming-graph Laplacian over all 4^k motifs of length k.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SpringStatus spring_structure_hamming(uint32_t k, uint32_t ell, struct SpringStructure **out);

/**
 * Precision matrix of a single-chromosome genetic map given the
 * `n_markers - 1` consecutive distances in centiMorgan.
 *
 * # Safety
 * `distances` must be valid for reading `n_markers - 1` doubles; `out`
 * must be valid for writing one pointer.
 */
enum SpringStatus spring_structure_genetic(const double *distances,
                                           size_t n_markers,
                                           double rho,
                                           struct SpringStructure **out);

/**
 * User-supplied symmetric positive semidefinite p×p matrix (row-major).
 *
 * # Safety
 * `values` must be valid for reading `p * p` doubles; `out` must be valid
 * for writing one pointer.
 */
enum SpringStatus spring_structure_custom(const double *values,
                                          size_t p,
                                          struct SpringStructure **out);

/**
 * Dimension of a structure matrix, 0 for null.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t spring_structure_dim(const struct SpringStructure *s);

/**
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void spring_structure_free(struct SpringStructure *s);

/**
 * Fits one (lambda1, lambda2) pair. `x` is n×p and `y` n×q, row-major.
 * With `standardize` nonzero the columns are centered and responses scaled
 * to unit variance; otherwise the data must already be centered.
 *
 * # Safety
 * `x` and `y` must be valid for reading `n * p` and `n * q` doubles,
 * `structure` must be a live handle and `out` valid for writing one pointer.
 */
enum SpringStatus spring_fit(const double *x,
                             const double *y,
                             size_t n,
                             size_t p,
                             size_t q,
                             const struct SpringStructure *structure,
                             double lambda1,
                             double lambda2,
                             int32_t standardize,
                             struct SpringFitHandle **out);

/**
 * # Safety
 * `f` must be null or a live handle; `p` and `q` valid for writing.
 */
enum SpringStatus spring_fit_dims(const struct SpringFitHandle *f, size_t *p, size_t *q);

/**
 * Direct effects Ω_xy (p×q, row-major).
 *
 * # Safety
 * `f` must be a live handle and `buf` valid for writing `len` doubles.
 */
enum SpringStatus spring_fit_omega_xy(const struct SpringFitHandle *f, double *buf, size_t len);

/**
 * Response precision Ω_yy (q×q, row-major).
 *
 * # Safety
 * `f` must be a live handle and `buf` valid for writing `len` doubles.
 */
enum SpringStatus spring_fit_omega_yy(const struct SpringFitHandle *f, double *buf, size_t len);

/**
 * Regression coefficients B (p×q, row-major).
 *
 * # Safety
 * `f` must be a live handle and `buf` valid for writing `len` doubles.
 */
enum SpringStatus spring_fit_coefficients(const struct SpringFitHandle *f, double *buf, size_t len);

/**
 * Residual covariance R (q×q, row-major).
 *
 * # Safety
 * `f` must be a live handle and `buf` valid for writing `len` doubles.
 */
enum SpringStatus spring_fit_residual_cov(const struct SpringFitHandle *f, double *buf, size_t len);

/**
 * Final objective value, NaN for null.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
double spring_fit_objective(const struct SpringFitHandle *f);

/**
 * Estimated degrees of freedom, NaN for null.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
double spring_fit_df(const struct SpringFitHandle *f);

/**
 * Optimality residual of the returned solution, NaN for null.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
double spring_fit_kkt_residual(const struct SpringFitHandle *f);

/**
 * 1 if the solver met its stopping rule, 0 if not, -1 for null.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
int32_t spring_fit_converged(const struct SpringFitHandle *f);

/**
 * # Safety
 * `f` must be null or a handle not yet freed.
 */
void spring_fit_free(struct SpringFitHandle *f);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *spring_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPRING_H */
