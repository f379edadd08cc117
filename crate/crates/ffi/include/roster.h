#ifndef ROSTER_H
#define ROSTER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum RosterStatus {
  ROSTER_STATUS_OK = 0,
  /**
   * The question was answered in the negative; not an error.
   */
  ROSTER_STATUS_NO = 1,
  ROSTER_STATUS_INVALID_INPUT = 2,
  ROSTER_STATUS_INFEASIBLE = 3,
  ROSTER_STATUS_PRECONDITION = 4,
  ROSTER_STATUS_GUARDRAIL = 5,
  ROSTER_STATUS_NULL_POINTER = 6,
  ROSTER_STATUS_INTERNAL = 7,
} RosterStatus;

typedef struct RosterInstance RosterInstance;

typedef struct RosterPlan RosterPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library on the same thread.
 */
const char *roster_last_error(void);

/**
 * Parses and validates an instance.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum RosterStatus roster_instance_from_json(const char *json, struct RosterInstance **out);

/**
 * # Safety
 * `inst` must come from `roster_instance_from_json` and not be freed twice.
 */
void roster_instance_free(struct RosterInstance *inst);

/**
 * # Safety
 * `inst` must be a live instance handle.
 */
uint32_t roster_instance_task_count(const struct RosterInstance *inst);

/**
 * # Safety
 * `inst` must be a live instance handle.
 */
uint32_t roster_instance_workers(const struct RosterInstance *inst);

/**
 * `Ok` if a balanced assignment exists, `No` otherwise. When `certificate`
 * is not NULL it receives the certificate JSON, to be released with
 * `roster_string_free`.
 *
 * # Safety
 * `inst` must be a live instance handle; `certificate` NULL or writable.
 */
enum RosterStatus roster_decide(const struct RosterInstance *inst, char **certificate);

/**
 * `Ok` with a balanced plan in `out`, or `No` with `out` set to NULL.
 *
 * # Safety
 * `inst` must be a live instance handle; `out` must be writable.
 */
enum RosterStatus roster_solve(const struct RosterInstance *inst, struct RosterPlan **out);

/**
 * `Ok` if any feasible assignment exists, `No` otherwise.
 *
 * # Safety
 * `inst` must be a live instance handle.
 */
enum RosterStatus roster_feasible(const struct RosterInstance *inst);

/**
 * Smallest worker count admitting a balanced assignment (unrestricted
 * schedules only).
 *
 * # Safety
 * `inst` must be a live instance handle; `out` must be writable.
 */
enum RosterStatus roster_min_workers(const struct RosterInstance *inst, uint32_t *out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum RosterStatus roster_plan_from_json(const char *json, struct RosterPlan **out);

/**
 * # Safety
 * `plan` must come from this library and not be freed twice.
 */
void roster_plan_free(struct RosterPlan *plan);

/**
 * # Safety
 * `plan` must be a live plan handle.
 */
uint32_t roster_plan_period(const struct RosterPlan *plan);

/**
 * Worker of task `task` in week `week`, both 1-based; weeks wrap around the
 * period. Returns 0 for an unknown task or week 0.
 *
 * # Safety
 * `plan` must be a live plan handle.
 */
uint32_t roster_plan_worker(const struct RosterPlan *plan, uint32_t task, uint32_t week);

/**
 * # Safety
 * `plan` must be a live plan handle; `out` must be writable.
 */
enum RosterStatus roster_plan_to_json(const struct RosterPlan *plan, char **out);

/**
 * `Ok` if the plan is feasible and balanced, `No` otherwise. Either flag
 * pointer may be NULL.
 *
 * # Safety
 * Handles must be live; flag pointers NULL or writable.
 */
enum RosterStatus roster_verify(const struct RosterInstance *inst,
                                const struct RosterPlan *plan,
                                bool *feasible,
                                bool *balanced);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void roster_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROSTER_H */
