#ifndef GCT_H
#define GCT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum GctStatus {
  GCT_STATUS_OK = 0,
  GCT_STATUS_NULL_ARGUMENT = 1,
  GCT_STATUS_INVALID_UTF8 = 2,
  GCT_STATUS_PARSE_ERROR = 3,
  GCT_STATUS_UNKNOWN_ENTRY = 4,
  GCT_STATUS_INVALID_ARGUMENT = 5,
  GCT_STATUS_PANIC = 6,
} GctStatus;

/**
 * Opaque parsed workspace.
 */
typedef struct GctWorkspace GctWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `.gct` source text into a new workspace written to `*out`.
 *
 * # Safety
 * `text` is a NUL-terminated string and `out` is valid for writes.
 */
enum GctStatus gct_workspace_parse(const char *text, struct GctWorkspace **out);

/**
 * Loads a catalogue entry such as `heisenberg` or `r2n1-new(3)`.
 *
 * # Safety
 * `id` is a NUL-terminated string and `out` is valid for writes.
 */
enum GctStatus gct_workspace_from_catalogue(const char *id, struct GctWorkspace **out);

/**
 * Canonical source text of a workspace, or null on failure.
 *
 * # Safety
 * `w` is null or a workspace returned by this library.
 */
char *gct_workspace_print(const struct GctWorkspace *w);

/**
 * Runs checks and writes the JSON report to `*json_out` and the verdict to `*passed`.
 *
 * `checks` is a comma-separated list of check names, or null for the workspace's own.
 * `samples` of zero selects the default sample count.
 *
 * # Safety
 * `w` is a workspace returned by this library, `checks` is null or NUL-terminated,
 * and `json_out` and `passed` are valid for writes.
 */
enum GctStatus gct_run_report(const struct GctWorkspace *w,
                              const char *checks,
                              uint32_t samples,
                              uint64_t seed,
                              char **json_out,
                              bool *passed);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void gct_string_free(char *s);

/**
 * Releases a workspace. Null is ignored.
 *
 * # Safety
 * `w` is null or a workspace returned by this library and not yet freed.
 */
void gct_workspace_free(struct GctWorkspace *w);

/**
 * Message for the most recent failure on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *gct_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCT_H */
