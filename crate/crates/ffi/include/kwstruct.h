#ifndef KWSTRUCT_H
#define KWSTRUCT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define KWS_MODE_NAIVE 0

#define KWS_MODE_REDUCED 1

#define KWS_STRATEGY_NEW_CAMPAIGN 0

#define KWS_STRATEGY_MIN_NEGATIVES 1

typedef enum KwsStatus {
  KWS_STATUS_OK = 0,
  KWS_STATUS_NULL_ARGUMENT = 1,
  KWS_STATUS_INVALID_UTF8 = 2,
  KWS_STATUS_PARSE_ERROR = 3,
  KWS_STATUS_INVALID_INPUT = 4,
  KWS_STATUS_LIMIT_EXCEEDED = 5,
  KWS_STATUS_VERIFICATION_FAILED = 6,
  KWS_STATUS_PANIC = 7,
} KwsStatus;

/**
 * Opaque account handle.
 */
typedef struct KwsAccount KwsAccount;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build an account from rules as JSON lines and brand lists as newline
 * separated text (`brands` and `non_brands` may be null).
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum KwsStatus kws_account_build(const char *rules_jsonl,
                                 const char *brands_text,
                                 const char *non_brands_text,
                                 uint32_t mode,
                                 struct KwsAccount **out);

/**
 * # Safety
 * `json` must be null or NUL-terminated; `out` must be writable.
 */
enum KwsStatus kws_account_from_json(const char *json_text, struct KwsAccount **out);

/**
 * Canonical snapshot JSON of the account.
 *
 * # Safety
 * `account` must come from this library; `out` must be writable.
 */
enum KwsStatus kws_account_to_json(const struct KwsAccount *account_ptr, char **out);

/**
 * # Safety
 * `account` must be null or come from this library, and not be used again.
 */
void kws_account_free(struct KwsAccount *account_ptr);

/**
 * Trace one query; the trajectory is written as JSON.
 *
 * # Safety
 * `account` must come from this library; `query` must be NUL-terminated.
 */
enum KwsStatus kws_simulate(const struct KwsAccount *account_ptr,
                            const char *query,
                            char **out_json);

/**
 * Check the routing properties. Returns `KWS_STATUS_VERIFICATION_FAILED`
 * when any check fails; the report is written either way.
 *
 * # Safety
 * `account` must come from this library; `out_report` may be null.
 */
enum KwsStatus kws_verify(const struct KwsAccount *account_ptr,
                          uint64_t seed,
                          size_t probes,
                          char **out_report);

/**
 * Add a rule in place. `items` is a comma separated list of item ids.
 * The change log is written as JSON when `out_changes` is not null.
 *
 * # Safety
 * `account` must come from this library; strings must be NUL-terminated.
 */
enum KwsStatus kws_account_add_rule(struct KwsAccount *account_ptr,
                                    const char *keyword,
                                    uint64_t cpc_micros,
                                    const char *items,
                                    uint32_t strategy,
                                    char **out_changes);

/**
 * Remove a rule in place.
 *
 * # Safety
 * `account` must come from this library; `keyword` must be NUL-terminated.
 */
enum KwsStatus kws_account_remove_rule(struct KwsAccount *account_ptr,
                                       const char *keyword,
                                       char **out_changes);

/**
 * m² + (√n + 2)m' + 2n√n.
 */
double kws_bounds_worst_case(uint64_t n, uint64_t m, uint64_t m_prime);

/**
 * Exact naive count for the given group sizes; 0 when `parts` is null.
 *
 * # Safety
 * `parts` must point to `len` readable values.
 */
uint64_t kws_nk_exact(uint64_t m, uint64_t m_prime, const uint64_t *parts, size_t len);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *kws_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void kws_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KWSTRUCT_H */
