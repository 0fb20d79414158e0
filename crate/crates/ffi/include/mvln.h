#ifndef MVLN_H
#define MVLN_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum mvln_status {
  MVLN_OK = 0,
  MVLN_NULL_ARGUMENT = 1,
  MVLN_PARSE_ERROR = 2,
  MVLN_INVALID_ARGUMENT = 3,
  MVLN_NOT_SYNCHRONOUS = 4,
  MVLN_INFEASIBLE = 5,
  MVLN_INTERNAL_ERROR = 6,
} mvln_status;

/**
 * Opaque handle to a parsed network and its augmented dynamics.
 */
typedef struct mvln_network mvln_network;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse network source text into a handle. On success writes a handle to
 * `out`; the caller owns it and must free it with `mvln_network_free`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum mvln_status mvln_network_parse(const char *text, struct mvln_network **out);

/**
 * # Safety
 * `handle` must come from `mvln_network_parse` and not be freed twice.
 */
void mvln_network_free(struct mvln_network *handle);

/**
 * Number of nodes per network.
 *
 * # Safety
 * `handle` must be a live handle.
 */
uintptr_t mvln_network_node_count(const struct mvln_network *handle);

/**
 * Value count k of the logic.
 *
 * # Safety
 * `handle` must be a live handle.
 */
uintptr_t mvln_network_value_count(const struct mvln_network *handle);

/**
 * Run the full synchronization analysis and write a JSON report string.
 *
 * # Safety
 * `handle` must be live; `out` must be a valid pointer.
 */
enum mvln_status mvln_analyze_json(const struct mvln_network *handle,
                                   uintptr_t gamma,
                                   bool full_basin,
                                   char **out);

/**
 * Pinning synthesis (policy 0 = lowest-index, 1 = seeded with `seed`),
 * reported as JSON. Succeeds with an empty pinning section when the system
 * already synchronizes.
 *
 * # Safety
 * `handle` must be live; `out` must be a valid pointer.
 */
enum mvln_status mvln_pin_json(const struct mvln_network *handle,
                               uintptr_t gamma,
                               uint32_t policy,
                               uint64_t seed,
                               char **out);

/**
 * Simulate `steps` steps from the composite δ-index `xi` and write a CSV
 * trajectory.
 *
 * # Safety
 * `handle` must be live; `out` must be a valid pointer.
 */
enum mvln_status mvln_simulate_csv(const struct mvln_network *handle,
                                   uintptr_t xi,
                                   uintptr_t steps,
                                   char **out);

/**
 * Release a string returned by any mvln function.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void mvln_string_free(char *s);

/**
 * Static description of a status code.
 */
const char *mvln_status_message(enum mvln_status status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MVLN_H */
