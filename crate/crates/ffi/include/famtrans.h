#ifndef FAMTRANS_H
#define FAMTRANS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum FtStatus {
  FT_STATUS_OK = 0,
  FT_STATUS_NULL_POINTER = 1,
  FT_STATUS_INVALID_UTF8 = 2,
  FT_STATUS_PARSE = 3,
  FT_STATUS_CONFIG = 4,
  FT_STATUS_HORIZON_EXHAUSTED = 5,
  FT_STATUS_CAP_EXCEEDED = 6,
  FT_STATUS_PRECONDITION = 7,
  FT_STATUS_SPACER_EXHAUSTED = 8,
  FT_STATUS_IO = 9,
  FT_STATUS_PANIC = 10,
} FtStatus;

/**
 * A finite prefix of a point of a subshift.
 */
typedef struct FtPoint FtPoint;

/**
 * A shift rule.
 */
typedef struct FtRule FtRule;

/**
 * A windowed set of non-negative integers.
 */
typedef struct FtSet FtSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *ft_last_error(void);

/**
 * Library version as a static string.
 */
const char *ft_version(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library that has not been freed.
 */
void ft_string_free(char *s);

/**
 * Parse a rule literal such as `spacing(dyadic())`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum FtStatus ft_rule_parse(const char *text, struct FtRule **out);

/**
 * # Safety
 * `rule` must be null or a live handle from [`ft_rule_parse`].
 */
void ft_rule_free(struct FtRule *rule);

/**
 * Canonical literal of a rule.
 *
 * # Safety
 * `rule` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_rule_to_string(const struct FtRule *rule, char **out);

/**
 * Whether a finite word over {0,1} is admissible.
 *
 * # Safety
 * `symbols` must point to `len` readable bytes; `out` must be writable.
 */
enum FtStatus ft_rule_is_admissible(const struct FtRule *rule,
                                    const uint8_t *symbols,
                                    size_t len,
                                    bool *out);

/**
 * A window `[0, horizon)` holding `members` (any order, duplicates allowed).
 *
 * # Safety
 * `members` must point to `len` readable values; `out` must be writable.
 */
enum FtStatus ft_set_new(uint64_t horizon, const uint64_t *members, size_t len, struct FtSet **out);

/**
 * # Safety
 * `set` must be null or a live handle from this library.
 */
void ft_set_free(struct FtSet *set);

/**
 * Number of members and window bound.
 *
 * # Safety
 * `set` must be a live handle; the out-pointers must be writable.
 */
enum FtStatus ft_set_info(const struct FtSet *set, size_t *len, uint64_t *horizon);

/**
 * Copy up to `cap` members into `buf`; `written` receives the count copied.
 *
 * # Safety
 * `buf` must have room for `cap` values; `written` must be writable.
 */
enum FtStatus ft_set_members(const struct FtSet *set, uint64_t *buf, size_t cap, size_t *written);

/**
 * Difference set `{b - a : a < b members}` on the same window.
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_set_difference(const struct FtSet *set, struct FtSet **out);

/**
 * Evaluate a family query (e.g. `nabla(thick(4))`, `fa(1,2;3,64)`) on a set
 * and return the report as JSON.
 *
 * # Safety
 * `set` must be a live handle; `query` a NUL-terminated string; `out` writable.
 */
enum FtStatus ft_family_report(const struct FtSet *set, const char *query, char **out);

/**
 * Hitting times `n` in `[1, horizon]` of the cylinders `[u]` and `[v]`,
 * both anchored at position 0.
 *
 * # Safety
 * `u`, `v` must point to `ulen`, `vlen` readable bytes; `out` writable.
 */
enum FtStatus ft_hitting_window(const struct FtRule *rule,
                                const uint8_t *u,
                                size_t ulen,
                                const uint8_t *v,
                                size_t vlen,
                                uint64_t horizon,
                                struct FtSet **out);

/**
 * Sweep all cylinder tuples for `a`-transitivity (`diagonal == false`) or
 * diagonal `a`-transitivity (`diagonal == true`); returns the report as JSON.
 *
 * # Safety
 * `a` must point to `alen` readable values; `out` writable.
 */
enum FtStatus ft_check_transitivity(const struct FtRule *rule,
                                    const uint64_t *a,
                                    size_t alen,
                                    size_t wordlen,
                                    uint64_t horizon,
                                    bool diagonal,
                                    char **out);

/**
 * Champernowne prefix containing every binary word of length `<= scale`.
 *
 * # Safety
 * `out` must be writable.
 */
enum FtStatus ft_point_champernowne(size_t scale, struct FtPoint **out);

/**
 * Greedy transitive point for `rule` covering words of length `<= scale`,
 * with prefix length at least `min_len`.
 *
 * # Safety
 * `rule` must be a live handle; `out` writable.
 */
enum FtStatus ft_point_greedy(const struct FtRule *rule,
                              size_t scale,
                              uint64_t spacer_max,
                              size_t min_len,
                              struct FtPoint **out);

/**
 * Prefix of length `len` of the periodic point `w w w ...`.
 *
 * # Safety
 * `word` must point to `wlen` readable bytes; `out` writable.
 */
enum FtStatus ft_point_periodic(const uint8_t *word, size_t wlen, size_t len, struct FtPoint **out);

/**
 * # Safety
 * `point` must be null or a live handle from this library.
 */
void ft_point_free(struct FtPoint *point);

/**
 * Length of the point prefix.
 *
 * # Safety
 * `point` must be a live handle; `out` writable.
 */
enum FtStatus ft_point_len(const struct FtPoint *point, size_t *out);

/**
 * Entering times of the point into `[u]` within `[1, h]`.
 *
 * # Safety
 * `u` must point to `ulen` readable bytes; `out` writable.
 */
enum FtStatus ft_point_entering_window(const struct FtPoint *point,
                                       const uint8_t *u,
                                       size_t ulen,
                                       uint64_t h,
                                       struct FtSet **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAMTRANS_H */
