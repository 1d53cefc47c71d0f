#ifndef PU_FFI_H
#define PU_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PuStatus {
  PU_STATUS_OK = 0,
  PU_STATUS_NULL_POINTER = 1,
  PU_STATUS_INVALID_ARGUMENT = 2,
  PU_STATUS_DEGENERATE = 3,
  PU_STATUS_SINGULAR = 4,
  PU_STATUS_NO_SOLUTION = 5,
  PU_STATUS_NUMERICAL = 6,
  PU_STATUS_ALL_BOUNDED = 7,
  PU_STATUS_ALL_UNBOUNDED = 8,
  PU_STATUS_BUFFER_TOO_SMALL = 9,
  PU_STATUS_PANIC = 10,
  PU_STATUS_INTERNAL = 11,
} PuStatus;

typedef enum PuMatrix {
  /**
   * Hessian of the canonical energy `H1`.
   */
  PU_MATRIX_H1 = 0,
  /**
   * Hessian of the second conserved quadratic `H2`.
   */
  PU_MATRIX_H2 = 1,
  /**
   * Canonical Poisson tensor in the jet chart.
   */
  PU_MATRIX_J1 = 2,
  PU_MATRIX_J2 = 3,
  /**
   * Linear free flow `z' = A z`.
   */
  PU_MATRIX_FLOW = 4,
} PuMatrix;

/**
 * Opaque frequency pair.
 */
typedef struct PuModel PuModel;

/**
 * Opaque sampled trajectory.
 */
typedef struct PuTrajectory PuTrajectory;

typedef struct PuTrajectorySummary {
  size_t samples;
  bool escaped;
  /**
   * NaN unless `escaped`.
   */
  double escape_time;
  double max_norm;
  double h1_drift;
  double h2_drift;
  double hint_drift;
  size_t accepted_steps;
  size_t rejected_steps;
} PuTrajectorySummary;

typedef struct PuThreshold {
  double lambda_star;
  double bracket_lo;
  double bracket_hi;
  bool non_monotone;
} PuThreshold;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pu_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t pu_last_error_message(char *buf, size_t len);

/**
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum PuStatus pu_model_new(double omega1, double omega2, struct PuModel **out);

/**
 * # Safety
 * `m` must be null or a handle from [`pu_model_new`] not yet freed.
 */
void pu_model_free(struct PuModel *m);

/**
 * `alpha = w1^2 + w2^2`, `beta = w1^2 w2^2`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PuStatus pu_model_coefficients(const struct PuModel *m, double *alpha, double *beta);

/**
 * Writes the requested jet-chart matrix to `out[16]`.
 *
 * # Safety
 * `out` must be valid for 16 doubles.
 */
enum PuStatus pu_model_matrix(const struct PuModel *m, enum PuMatrix which, double *out);

/**
 * `(q, q', q'', q''')` to `(x1, x2, p1, p2)`.
 *
 * # Safety
 * `jet` and `out` must be valid for 4 doubles.
 */
enum PuStatus pu_jet_to_ostro(const struct PuModel *m, const double *jet, double *out);

/**
 * # Safety
 * `ostro` and `out` must be valid for 4 doubles.
 */
enum PuStatus pu_ostro_to_jet(const struct PuModel *m, const double *ostro, double *out);

/**
 * Mode amplitudes of a jet state as `(re a1, im a1, re a2, im a2)`, with
 * `q(t) = 2 Re(a1 e^{-i w1 t} + a2 e^{-i w2 t})`, and the per-mode energies
 * `(e1, e2)` whose sum is `H1`.
 *
 * # Safety
 * `jet` and `amplitudes` must be valid for 4 doubles, `energies` for 2 (or null).
 */
enum PuStatus pu_modes(const struct PuModel *m,
                       const double *jet,
                       double *amplitudes,
                       double *energies);

/**
 * Integrates from the jet state `z0` with `W = lambda q^4 / 4` (`lambda = 0`
 * is the free flow) up to `t_end` or escape.
 *
 * # Safety
 * `z0` must be valid for 4 doubles, `out` for one pointer.
 */
enum PuStatus pu_integrate(const struct PuModel *m,
                           double lambda,
                           const double *z0,
                           double t_end,
                           double tol,
                           struct PuTrajectory **out);

/**
 * # Safety
 * `t` must be null or a handle from [`pu_integrate`] not yet freed.
 */
void pu_trajectory_free(struct PuTrajectory *t);

/**
 * # Safety
 * `t` and `out` must be valid.
 */
enum PuStatus pu_trajectory_summary(const struct PuTrajectory *t, struct PuTrajectorySummary *out);

/**
 * Copies sample times into `times[cap]` and jet states into `states[4 cap]`
 * (either may be null). Fails with `BufferTooSmall` if `cap` is below the
 * sample count reported by [`pu_trajectory_summary`].
 *
 * # Safety
 * Non-null buffers must hold `cap` (times) and `4 cap` (states) doubles.
 */
enum PuStatus pu_trajectory_samples(const struct PuTrajectory *t,
                                    double *times,
                                    double *states,
                                    size_t cap);

/**
 * Runaway threshold in `lambda` over `[0, lambda_max]` from the jet state
 * `z0`. `grid_points` and `bisection_iters` of zero take the defaults.
 * Returns `AllBounded` / `AllUnbounded` when the range holds no transition.
 *
 * # Safety
 * `z0` must be valid for 4 doubles, `out` for one [`PuThreshold`].
 */
enum PuStatus pu_threshold(const struct PuModel *m,
                           const double *z0,
                           double lambda_max,
                           double t_end,
                           double tol,
                           size_t grid_points,
                           size_t bisection_iters,
                           struct PuThreshold *out);

/**
 * Dimension of the linear symmetries of the free flow.
 *
 * # Safety
 * `out` must be valid.
 */
enum PuStatus pu_commutant_dimension(const struct PuModel *m, size_t *out);

/**
 * Dimension of constant Poisson tensors preserved by the flow with
 * `W = lambda q^4 / 4`, tested at `samples` seeded points when `lambda != 0`.
 *
 * # Safety
 * `out` must be valid.
 */
enum PuStatus pu_invariant_tensor_dimension(const struct PuModel *m,
                                            double lambda,
                                            size_t samples,
                                            uint64_t seed,
                                            size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PU_FFI_H */
