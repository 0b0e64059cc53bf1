#ifndef PBGSIM_H
#define PBGSIM_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum PbgStatus {
  PBG_STATUS_OK = 0,
  PBG_STATUS_NULL_POINTER = 1,
  PBG_STATUS_INVALID_ARGUMENT = 2,
  PBG_STATUS_SINGULARITY = 3,
  PBG_STATUS_CONSISTENCY = 4,
  PBG_STATUS_STEP_TOO_LARGE = 5,
  PBG_STATUS_NORM_DRIFT = 6,
  PBG_STATUS_NON_FINITE = 7,
  PBG_STATUS_MEMORY_CAP = 8,
  PBG_STATUS_BUFFER_TOO_SMALL = 9,
  PBG_STATUS_UNAVAILABLE = 10,
  PBG_STATUS_INTERNAL = 11,
} PbgStatus;

typedef enum PbgExperiment {
  PBG_EXPERIMENT_DECAY = 0,
  PBG_EXPERIMENT_TWO_PHOTON = 1,
  PBG_EXPERIMENT_ORACLE = 2,
} PbgExperiment;

typedef enum PbgScheme {
  PBG_SCHEME_MIDPOINT = 0,
  PBG_SCHEME_FIRST_ORDER = 1,
} PbgScheme;

// Selects one column of a trajectory.
typedef enum PbgObservable {
  PBG_OBSERVABLE_P_EXCITED = 0,
  PBG_OBSERVABLE_N_DEFECT = 1,
  PBG_OBSERVABLE_P_RES_ZERO = 2,
  PBG_OBSERVABLE_P_RES_ONE = 3,
  PBG_OBSERVABLE_P_RES_TWO = 4,
  PBG_OBSERVABLE_N_TOTAL = 5,
  PBG_OBSERVABLE_NORM_SQ = 6,
} PbgObservable;

// Discretized reservoir.
typedef struct PbgReservoir PbgReservoir;

// Sampled observables of one run.
typedef struct PbgTrajectory PbgTrajectory;

// Run parameters. Fill with [`pbg_params_default`] and adjust.
typedef struct PbgParams {
  size_t n_modes;
  double omega_u;
  // First mode above the band edge; zero or negative picks the cell-centred value.
  double delta_seed;
  enum PbgScheme scheme;
  double delta_o;
  double delta_d;
  double g_d;
  double coupling_c;
  double t_max;
  double dt;
  size_t sample_stride;
  bool include_shift;
} PbgParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *pbg_last_error(void);

// # Safety
// `out` must point to writable memory for one `PbgParams`.
enum PbgStatus pbg_params_default(enum PbgExperiment kind, struct PbgParams *out);

// # Safety
// `params` must be null or valid; `out` must be null or writable.
enum PbgStatus pbg_reservoir_new(const struct PbgParams *params, struct PbgReservoir **out);

// # Safety
// `res` must be null or a handle from [`pbg_reservoir_new`] not yet freed.
void pbg_reservoir_free(struct PbgReservoir *res);

// Number of modes; 0 for a null handle.
//
// # Safety
// `res` must be null or a live handle.
size_t pbg_reservoir_len(const struct PbgReservoir *res);

// # Safety
// `res` must be null or a live handle.
double pbg_reservoir_coupling(const struct PbgReservoir *res);

// # Safety
// `res` must be null or a live handle.
double pbg_reservoir_vacuum_shift(const struct PbgReservoir *res);

// Copies the mode frequencies into `buf`, which must hold at least
// [`pbg_reservoir_len`] values.
//
// # Safety
// `buf` must be writable for `len` doubles.
enum PbgStatus pbg_reservoir_frequencies(const struct PbgReservoir *res, double *buf, size_t len);

// One-excitation decay from `|e,0>`.
//
// # Safety
// `params` must be null or valid; `out` must be null or writable.
enum PbgStatus pbg_run_decay(const struct PbgParams *params, struct PbgTrajectory **out);

// Two-excitation run from `|e,1_d,0>`.
//
// # Safety
// `params` must be null or valid; `out` must be null or writable.
enum PbgStatus pbg_run_two_photon(const struct PbgParams *params, struct PbgTrajectory **out);

// Continuum reference for the decay without a defect. Only
// `PBG_OBSERVABLE_P_EXCITED` is available on the result.
//
// # Safety
// `params` must be null or valid; `out` must be null or writable.
enum PbgStatus pbg_oracle_decay(const struct PbgParams *params, struct PbgTrajectory **out);

// # Safety
// `traj` must be null or a handle from one of the run functions not yet freed.
void pbg_trajectory_free(struct PbgTrajectory *traj);

// Number of samples; 0 for a null handle.
//
// # Safety
// `traj` must be null or a live handle.
size_t pbg_trajectory_len(const struct PbgTrajectory *traj);

// # Safety
// `buf` must be writable for `len` doubles.
enum PbgStatus pbg_trajectory_times(const struct PbgTrajectory *traj, double *buf, size_t len);

// # Safety
// `buf` must be writable for `len` doubles.
enum PbgStatus pbg_trajectory_observable(const struct PbgTrajectory *traj,
                                         enum PbgObservable which,
                                         double *buf,
                                         size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PBGSIM_H */
