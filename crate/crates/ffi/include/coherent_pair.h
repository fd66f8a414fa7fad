#ifndef COHERENT_PAIR_H
#define COHERENT_PAIR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpGradient {
  CP_GRADIENT_NUMERIC = 0,
  CP_GRADIENT_ANALYTIC = 1,
} CpGradient;

typedef enum CpRegime {
  CP_REGIME_CLASSICAL = 0,
  CP_REGIME_PASS_THROUGH = 1,
  CP_REGIME_FROZEN = 2,
  CP_REGIME_NO_RETURN = 3,
} CpRegime;

typedef enum CpSeriesKind {
  CP_SERIES_KIND_MONOTONE = 0,
  CP_SERIES_KIND_OSCILLATORY = 1,
  CP_SERIES_KIND_CONSTANT = 2,
} CpSeriesKind;

typedef enum CpSpin {
  CP_SPIN_ANTIPARALLEL = 0,
  CP_SPIN_PARALLEL = 1,
  CP_SPIN_DISTINGUISHABLE = 2,
} CpSpin;

typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_POINTER = 1,
  CP_STATUS_INVALID_CONFIG = 2,
  CP_STATUS_PRECONDITION_VIOLATED = 3,
  CP_STATUS_DEGENERATE_STATE = 4,
  CP_STATUS_NON_CONVERGENCE = 5,
  CP_STATUS_NON_FINITE = 6,
  CP_STATUS_MALFORMED_TRAJECTORY = 7,
  CP_STATUS_OUT_OF_RANGE = 8,
  CP_STATUS_PANIC = 9,
} CpStatus;

/**
 * Opaque pair configuration.
 */
typedef struct CpPair CpPair;

/**
 * Opaque integrated trajectory.
 */
typedef struct CpTrajectory CpTrajectory;

typedef struct CpVec3 {
  double x;
  double y;
  double z;
} CpVec3;

typedef struct CpEnergy {
  double kinetic_classical;
  double kinetic_uncertainty;
  double kinetic_exchange;
  double coulomb_direct;
  double coulomb_exchange;
  double total;
} CpEnergy;

typedef struct CpSample {
  double t;
  struct CpVec3 r;
  struct CpVec3 p;
  double sigma_t;
  double overlap;
  struct CpEnergy energy;
} CpSample;

typedef struct CpQuadrupole {
  double d_xx;
  double d_yy;
  double d_zz;
  double d_xz;
} CpQuadrupole;

/**
 * Traveltime of one sweep point; `t_coherent` is NaN when `returned` is
 * false.
 */
typedef struct CpSweepPoint {
  double p;
  bool returned;
  double t_coherent;
  double t_classical;
  double t_free;
  enum CpRegime regime;
} CpSweepPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`) and returns the full message length in
 * bytes, excluding the terminator. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes of writes.
 */
size_t cp_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cp_version(void);

/**
 * Creates a pair of packets at the culmination moment `t = 0` with
 * half-separation `r0` and momentum `p0`.
 *
 * # Safety
 * `out` must be valid for one pointer write. The handle is released with
 * [`cp_pair_free`].
 */
enum CpStatus cp_pair_new(double sigma,
                          struct CpVec3 r0,
                          struct CpVec3 p0,
                          enum CpSpin spin,
                          double coupling,
                          bool frozen_width,
                          struct CpPair **out);

/**
 * # Safety
 * `pair` must be null or a handle from [`cp_pair_new`] not yet freed.
 */
void cp_pair_free(struct CpPair *pair);

/**
 * Averaged Hamiltonian of the initial state.
 *
 * # Safety
 * `pair` must be a live handle and `out` valid for one write.
 */
enum CpStatus cp_pair_energy(const struct CpPair *pair, struct CpEnergy *out);

/**
 * Upper bound of the Coulomb energy over separations at width `sigma_x(t)`.
 *
 * # Safety
 * `pair` must be a live handle and `out` valid for one write.
 */
enum CpStatus cp_pair_coulomb_bound(const struct CpPair *pair, double t, double *out);

/**
 * Integrates the pair from `t = 0` to `t_max` with step `dt`.
 *
 * # Safety
 * `pair` must be a live handle and `out` valid for one pointer write. The
 * trajectory is released with [`cp_trajectory_free`].
 */
enum CpStatus cp_simulate(const struct CpPair *pair,
                          double dt,
                          double t_max,
                          enum CpGradient gradient,
                          struct CpTrajectory **out);

/**
 * # Safety
 * `traj` must be null or a handle from [`cp_simulate`] not yet freed.
 */
void cp_trajectory_free(struct CpTrajectory *traj);

/**
 * Number of samples, including the initial one.
 *
 * # Safety
 * `traj` must be a live handle and `out` valid for one write.
 */
enum CpStatus cp_trajectory_len(const struct CpTrajectory *traj, size_t *out);

/**
 * # Safety
 * `traj` must be a live handle and `out` valid for one write.
 */
enum CpStatus cp_trajectory_sample(const struct CpTrajectory *traj,
                                   size_t index,
                                   struct CpSample *out);

/**
 * Quadrupole tensor at one sample; the configuration must lie in the x-z
 * plane.
 *
 * # Safety
 * `traj` must be a live handle and `out` valid for one write.
 */
enum CpStatus cp_trajectory_quadrupole(const struct CpTrajectory *traj,
                                       size_t index,
                                       struct CpQuadrupole *out);

/**
 * Return time to the initial separation (NaN and `returned = false` when
 * the pair never comes back) and the regime label.
 *
 * # Safety
 * `traj` must be a live handle; the out pointers must be valid for one
 * write each.
 */
enum CpStatus cp_trajectory_traveltime(const struct CpTrajectory *traj,
                                       bool *returned,
                                       double *t_return,
                                       enum CpRegime *out_regime);

/**
 * Shape of the `d_zz` series over the whole trajectory.
 *
 * # Safety
 * `traj` must be a live handle; the out pointers must be valid for one
 * write each.
 */
enum CpStatus cp_trajectory_quadrupole_verdict(const struct CpTrajectory *traj,
                                               enum CpSeriesKind *kind,
                                               size_t *extrema);

/**
 * Head-on traveltime at momentum `p` toward the partner, with the default
 * step `t_free / 1000` and horizon `50 t_free`. The momentum stored in
 * `pair` is ignored.
 *
 * # Safety
 * `pair` must be a live handle and `out` valid for one write.
 */
enum CpStatus cp_sweep_point(const struct CpPair *pair,
                             double p,
                             enum CpGradient gradient,
                             struct CpSweepPoint *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COHERENT_PAIR_H */
