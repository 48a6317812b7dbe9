#ifndef APSO_H
#define APSO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum ApsoStatus {
  APSO_STATUS_OK = 0,
  APSO_STATUS_NULL_POINTER = 1,
  APSO_STATUS_INVALID_UTF8 = 2,
  APSO_STATUS_PARSE = 3,
  APSO_STATUS_INVALID_PARAMS = 4,
  APSO_STATUS_INVALID_ARGUMENT = 5,
  APSO_STATUS_NOT_FOUND = 6,
  APSO_STATUS_PANIC = 7,
} ApsoStatus;

// Opaque job-shop instance.
typedef struct ApsoInstance ApsoInstance;

// Opaque schedule: start times per job and operation.
typedef struct ApsoSchedule ApsoSchedule;

// The four behavioral parameters of the swarm.
typedef struct ApsoParams {
  double alpha1;
  double alpha2;
  double omega;
  double beta;
} ApsoParams;

// Swarm size, run length, seed and schedule builder for [`apso_solve`].
typedef struct ApsoSolveOptions {
  size_t n_particles;
  size_t n_iterations;
  uint64_t seed;
  // true: gap-filling builder; false: semi-active.
  bool gap_filling;
} ApsoSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses an instance in the `n m` header plus `machine duration` pairs
// format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum ApsoStatus apso_instance_parse(const char *text, struct ApsoInstance **out);

// Builds an instance from row-major `n_jobs * n_machines` arrays of 0-based
// machine indices and durations.
//
// # Safety
// `machines` and `durations` must each point to `n_jobs * n_machines`
// elements and `out` must be a valid pointer.
enum ApsoStatus apso_instance_from_arrays(size_t n_jobs,
                                          size_t n_machines,
                                          const size_t *machines,
                                          const uint64_t *durations,
                                          struct ApsoInstance **out);

// Releases an instance. Null is ignored.
//
// # Safety
// `inst` must come from this library and not be used afterwards.
void apso_instance_free(struct ApsoInstance *inst);

// Number of jobs, or 0 for a null handle.
//
// # Safety
// `inst` must be null or a live instance handle.
size_t apso_instance_n_jobs(const struct ApsoInstance *inst);

// Number of machines, or 0 for a null handle.
//
// # Safety
// `inst` must be null or a live instance handle.
size_t apso_instance_n_machines(const struct ApsoInstance *inst);

// Max of the longest job and the most loaded machine, or 0 for a null handle.
//
// # Safety
// `inst` must be null or a live instance handle.
uint64_t apso_instance_lower_bound(const struct ApsoInstance *inst);

// Looks up a named parameter set: `kennedy`, `pedersen` or `apso`.
//
// # Safety
// `label` must be a NUL-terminated string and `out` a valid pointer.
enum ApsoStatus apso_params_preset(const char *label, struct ApsoParams *out);

// 50 particles, 100 iterations, seed 0, gap-filling builder.
struct ApsoSolveOptions apso_solve_options_default(void);

// Runs one seeded swarm and returns the best schedule found.
//
// # Safety
// `inst` must be a live instance handle; `params`, `options` and `out` must
// be valid pointers. A null `options` selects the defaults.
enum ApsoStatus apso_solve(const struct ApsoInstance *inst,
                           const struct ApsoParams *params,
                           const struct ApsoSolveOptions *options,
                           struct ApsoSchedule **out);

// Decodes a random-key position of length `n_jobs * n_machines`.
//
// # Safety
// `inst` must be a live instance handle, `x` must point to `len` doubles and
// `out` must be a valid pointer.
enum ApsoStatus apso_decode(const struct ApsoInstance *inst,
                            const double *x,
                            size_t len,
                            bool gap_filling,
                            struct ApsoSchedule **out);

// Makespan of a schedule, or 0 for a null handle.
//
// # Safety
// `schedule` must be null or a live schedule handle.
uint64_t apso_schedule_makespan(const struct ApsoSchedule *schedule);

// Start time of operation `index` of `job`.
//
// # Safety
// `schedule` must be a live schedule handle and `out` a valid pointer.
enum ApsoStatus apso_schedule_start(const struct ApsoSchedule *schedule,
                                    size_t job,
                                    size_t index,
                                    uint64_t *out);

// Writes whether `schedule` respects job order and machine capacity of `inst`.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum ApsoStatus apso_schedule_is_feasible(const struct ApsoSchedule *schedule,
                                          const struct ApsoInstance *inst,
                                          bool *out);

// Releases a schedule. Null is ignored.
//
// # Safety
// `schedule` must come from this library and not be used afterwards.
void apso_schedule_free(struct ApsoSchedule *schedule);

// Best-known makespan of a Lawrence instance such as `LA01`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum ApsoStatus apso_best_known(const char *name, uint64_t *out);

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next call into this library on the same thread.
const char *apso_last_error(void);

// Library version as a static string.
const char *apso_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APSO_H */
