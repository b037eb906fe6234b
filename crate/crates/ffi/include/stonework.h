#ifndef STONEWORK_H
#define STONEWORK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum StwStatus {
  STW_STATUS_OK = 0,
  STW_STATUS_NULL_POINTER = 1,
  STW_STATUS_INVALID_UTF8 = 2,
  STW_STATUS_PARSE = 3,
  // The input parsed but violates a structural law.
  STW_STATUS_DOMAIN = 4,
  STW_STATUS_RESOURCE_LIMIT = 5,
  STW_STATUS_OUT_OF_RANGE = 6,
  STW_STATUS_PANIC = 7,
} StwStatus;

// Which translations a nonexpansiveness check uses.
typedef enum StwSide {
  STW_SIDE_LEFT = 0,
  STW_SIDE_RIGHT = 1,
} StwSide;

// A truncation of the Cantor-cube contrast monoid.
typedef struct StwContrast StwContrast;

// An ultra-pseudometric on `{0, .., n-1}` with rational values.
typedef struct StwMetric StwMetric;

// A validated finite monoid.
typedef struct StwMonoid StwMonoid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message of the last failed call on this thread, or an empty string.
// The pointer stays valid until the next call into this library.
const char *stw_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void stw_string_free(char *s);

// Parses and validates `{"size", "identity", "table"}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum StwStatus stw_monoid_from_json(const char *json, struct StwMonoid **out);

// Serializes a monoid back to JSON.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum StwStatus stw_monoid_to_json(const struct StwMonoid *m, char **out);

// Number of elements, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
uintptr_t stw_monoid_size(const struct StwMonoid *m);

// Index of the identity element.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum StwStatus stw_monoid_identity(const struct StwMonoid *m, uintptr_t *out);

// The product `a · b`.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum StwStatus stw_monoid_mul(const struct StwMonoid *m, uintptr_t a, uintptr_t b, uintptr_t *out);

// Releases a monoid. Null is ignored.
//
// # Safety
// `m` must be null or a live handle, not used afterwards.
void stw_monoid_free(struct StwMonoid *m);

// Parses and validates `{"dist": [["p/q", ..], ..]}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum StwStatus stw_metric_from_json(const char *json, struct StwMetric **out);

// Builds the metric of a monotone chain `{"carrier_size", "chain"}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum StwStatus stw_metric_from_chain_json(const char *json, struct StwMetric **out);

// Serializes a metric back to JSON.
//
// # Safety
// `d` must be a live handle; `out` must be writable.
enum StwStatus stw_metric_to_json(const struct StwMetric *d, char **out);

// The distance `d(x, y)` as a reduced fraction `"p/q"` (or `"p"`).
//
// # Safety
// `d` must be a live handle; `out` must be writable.
enum StwStatus stw_metric_distance(const struct StwMetric *d, uintptr_t x, uintptr_t y, char **out);

// Releases a metric. Null is ignored.
//
// # Safety
// `d` must be null or a live handle, not used afterwards.
void stw_metric_free(struct StwMetric *d);

// Checks `d` against the translations on `side`. `*nonexpansive` receives
// the verdict; when it is false and `witness` is non-null, `*witness`
// receives `{"side", "s", "x", "y"}` as JSON.
//
// # Safety
// Handles must be live; `nonexpansive` must be writable; `witness` may be
// null.
enum StwStatus stw_check_nonexpansive(const struct StwMonoid *m,
                                      const struct StwMetric *d,
                                      enum StwSide side,
                                      bool *nonexpansive,
                                      char **witness);

// Maps a self-map `[s(0), .., s(n-1)]` to
// `{"self_map", "ring_endo", "dual_endo"}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum StwStatus stw_dualize_json(const char *json, char **out);

// Builds the level-`k` contrast monoid, `1 ≤ k ≤ 16`.
//
// # Safety
// `out` must be writable.
enum StwStatus stw_contrast_new(uintptr_t k, struct StwContrast **out);

// A new monoid handle holding the contrast monoid's table.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum StwStatus stw_contrast_monoid(const struct StwContrast *c, struct StwMonoid **out);

// A new metric handle holding the contrast monoid's metric.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum StwStatus stw_contrast_metric(const struct StwContrast *c, struct StwMetric **out);

// The certificate, table digest and obstruction witnesses as JSON.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum StwStatus stw_contrast_report_json(const struct StwContrast *c, char **out);

// Releases a contrast handle. Null is ignored.
//
// # Safety
// `c` must be null or a live handle, not used afterwards.
void stw_contrast_free(struct StwContrast *c);

// Runs the whole verification suite. `*passed` receives whether every
// check passed; `report`, when non-null, receives the JSON report.
//
// # Safety
// `passed` must be writable; `report` may be null.
enum StwStatus stw_verify_all(uintptr_t bound_points,
                              uintptr_t bound_atoms,
                              uintptr_t bound_k,
                              uint64_t seed,
                              bool *passed,
                              char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STONEWORK_H */
