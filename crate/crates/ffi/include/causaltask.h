#ifndef CAUSALTASK_H
#define CAUSALTASK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CtCausalClass {
  CT_CAUSAL_CLASS_COINCIDENT = 0,
  CT_CAUSAL_CLASS_FUTURE = 1,
  CT_CAUSAL_CLASS_PAST = 2,
  CT_CAUSAL_CLASS_SPACELIKE = 3,
} CtCausalClass;

typedef enum CtStatus {
  CT_STATUS_OK = 0,
  /**
   * Bad scenario text, pattern, parameters or an unsupported request.
   */
  CT_STATUS_INPUT_ERROR = 2,
  CT_STATUS_NULL_POINTER = 4,
  CT_STATUS_INVALID_UTF8 = 5,
  /**
   * A bug inside the library; the handle arguments are left untouched.
   */
  CT_STATUS_PANIC = 6,
} CtStatus;

typedef enum CtTaskKind {
  CT_TASK_KIND_SUMMONING = 0,
  CT_TASK_KIND_REFINED = 1,
  CT_TASK_KIND_ORIGINAL = 2,
} CtTaskKind;

/**
 * A finished report.
 */
typedef struct CtResult CtResult;

/**
 * A parsed scenario file.
 */
typedef struct CtScenario CtScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses scenario text. On success `*out` owns a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CtStatus ct_scenario_parse(const char *text, struct CtScenario **out);

/**
 * # Safety
 * `scenario` must come from [`ct_scenario_parse`] or be null.
 */
void ct_scenario_free(struct CtScenario *scenario);

/**
 * # Safety
 * `scenario` and `out` must be valid pointers.
 */
enum CtStatus ct_scenario_kind(const struct CtScenario *scenario, enum CtTaskKind *out);

/**
 * Canonical text of the scenario; free with [`ct_string_free`].
 *
 * # Safety
 * `scenario` must be a valid handle or null.
 */
char *ct_scenario_format(const struct CtScenario *scenario);

/**
 * Checks the scenario; for summoning tasks also the causal order of its points.
 *
 * # Safety
 * `scenario` and `out` must be valid pointers.
 */
enum CtStatus ct_validate(const struct CtScenario *scenario, struct CtResult **out);

/**
 * Runs the built-in strategy for one pattern. `relay < 0` means `D/2`.
 *
 * # Safety
 * `scenario`, `pattern` and `out` must be valid pointers.
 */
enum CtStatus ct_run(const struct CtScenario *scenario,
                     const char *pattern,
                     int64_t relay,
                     struct CtResult **out);

/**
 * Exhaustive strategy search. `budget_ms == 0` means no budget.
 *
 * # Safety
 * `scenario` and `out` must be valid pointers.
 */
enum CtStatus ct_search(const struct CtScenario *scenario,
                        uint32_t workers,
                        uint64_t budget_ms,
                        struct CtResult **out);

/**
 * Token feasibility for a summoning scenario.
 *
 * # Safety
 * `scenario` and `out` must be valid pointers.
 */
enum CtStatus ct_token(const struct CtScenario *scenario, struct CtResult **out);

/**
 * Runs a built-in demo with its default parameters.
 *
 * # Safety
 * `name` and `out` must be valid pointers.
 */
enum CtStatus ct_demo(const char *name, uint32_t workers, struct CtResult **out);

/**
 * 0 success or feasible, 1 failure or infeasible, 3 exhausted; -1 for null.
 *
 * # Safety
 * `result` must be a valid handle or null.
 */
int32_t ct_result_exit_code(const struct CtResult *result);

/**
 * Rendered report; `machine != 0` selects the key=value section only.
 * Free with [`ct_string_free`].
 *
 * # Safety
 * `result` must be a valid handle or null.
 */
char *ct_result_render(const struct CtResult *result, int32_t machine);

/**
 * # Safety
 * `result` must come from this library or be null.
 */
void ct_result_free(struct CtResult *result);

/**
 * Causal class of `b` relative to `a`. Both points have `dim` spatial
 * coordinates.
 *
 * # Safety
 * `xa` and `xb` must point to `dim` integers each; `out` must be valid.
 */
enum CtStatus ct_classify(int64_t ta,
                          const int64_t *xa,
                          int64_t tb,
                          const int64_t *xb,
                          size_t dim,
                          enum CtCausalClass *out);

/**
 * Message for the last failed call on this thread, or null. Free with
 * [`ct_string_free`].
 */
char *ct_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void ct_string_free(char *s);

/**
 * Library version, static storage.
 */
const char *ct_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAUSALTASK_H */
