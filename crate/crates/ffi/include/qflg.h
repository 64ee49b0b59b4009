#ifndef QFLG_H
#define QFLG_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum QflgStatus {
  QFLG_STATUS_OK = 0,
  QFLG_STATUS_NULL_POINTER = 1,
  QFLG_STATUS_INVALID_UTF8 = 2,
  QFLG_STATUS_PARSE = 3,
  QFLG_STATUS_INVALID_INPUT = 4,
  QFLG_STATUS_ZERO_INPUT = 5,
  QFLG_STATUS_INSUFFICIENT_PRECISION = 6,
  QFLG_STATUS_UNSUPPORTED_FIELD = 7,
  QFLG_STATUS_NOT_A_SQUARE = 8,
  QFLG_STATUS_NOT_A_UNIT = 9,
  QFLG_STATUS_NOT_DIVISOR_OF_DISTINGUISHED = 10,
  QFLG_STATUS_REDUCIBLE_FACTOR = 11,
  QFLG_STATUS_UNSUPPORTED_PLACE = 12,
  QFLG_STATUS_UNSUPPORTED_CENTER = 13,
  QFLG_STATUS_NO_CANONICAL_EXTENSION = 14,
  QFLG_STATUS_PRECISION_TOO_LOW_TO_CERTIFY = 15,
  QFLG_STATUS_WITNESS_SEARCH_EXHAUSTED = 16,
  QFLG_STATUS_CONSISTENCY_VIOLATION = 17,
  QFLG_STATUS_DEGREE_CAP_EXCEEDED = 18,
  QFLG_STATUS_PANIC = 19,
} QflgStatus;

typedef enum QflgVerdictKind {
  QFLG_VERDICT_KIND_OBSTRUCTED = 0,
  QFLG_VERDICT_KIND_ISOTROPIC = 1,
  QFLG_VERDICT_KIND_UNDECIDED = 2,
} QflgVerdictKind;

// A diagonal form over a complete discretely valued field, a finite field
// or `F_q(t)`.
typedef struct QflgCdvfForm QflgCdvfForm;

// A normalized diagonal form over `Frac(A[[y]])` or `K(y)`, `A = k[[x]]`.
typedef struct QflgForm QflgForm;

// Scan and search bounds.
typedef struct QflgBounds {
  uint32_t blowup_depth;
  uint32_t residue_degree_cap;
  uint32_t witness_degree_x;
  uint32_t witness_degree_y;
  uint32_t precision;
  uint64_t seed;
} QflgBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call on the same thread.
const char *qflg_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void qflg_string_free(char *s);

// Library version as a static string.
const char *qflg_version(void);

struct QflgBounds qflg_bounds_default(void);

// Parses `entries` (comma-separated) over `field`, e.g. `"F3((t))"` and
// `"1, 1, t, t"`. `precision` 0 selects the default.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be writable.
enum QflgStatus qflg_cdvf_form_new(const char *field,
                                   const char *entries,
                                   uint32_t precision,
                                   struct QflgCdvfForm **out);

// # Safety
// `form` must be null or a handle from [`qflg_cdvf_form_new`].
void qflg_cdvf_form_free(struct QflgCdvfForm *form);

// Decides isotropy; `certificate` (optional) receives the proof as JSON.
//
// # Safety
// `form` must be a live handle and `isotropic` writable; `certificate`
// may be null.
enum QflgStatus qflg_cdvf_decide(const struct QflgCdvfForm *form,
                                 bool *isotropic,
                                 char **certificate);

// Normalizes `entries` (comma-separated literal products such as
// `"1, y, x*(y - x)"`) over `FracR(k[[x]][[y]])` or `k((x))(y)`. The ring
// `k[[x]]` alone stands for the first.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be writable.
enum QflgStatus qflg_form_new(const char *field,
                              const char *entries,
                              uint32_t precision,
                              struct QflgForm **out);

// # Safety
// `form` must be null or a handle from [`qflg_form_new`].
void qflg_form_free(struct QflgForm *form);

// Number of entries.
//
// # Safety
// `form` must be a live handle and `rank` writable.
enum QflgStatus qflg_form_rank(const struct QflgForm *form, size_t *rank);

// Normalized entries as a JSON array of `{lambda, n, factors}` records.
//
// # Safety
// `form` must be a live handle and `json` writable.
enum QflgStatus qflg_form_normalized_json(const struct QflgForm *form, char **json);

// Local decision at `place` (`"gauss"`, `"infinity"`, `"special:POLY"`,
// `"generic:POLY"`, `"blowup:STEPS"` or place JSON).
//
// # Safety
// `form` must be a live handle, `place` NUL-terminated, `isotropic`
// writable; `certificate` may be null.
enum QflgStatus qflg_place_decide(const struct QflgForm *form,
                                  const char *place,
                                  bool *isotropic,
                                  char **certificate);

// Three-valued verdict; `report` (optional) receives the full report as
// JSON. A consistency violation returns
// [`QflgStatus::ConsistencyViolation`] with the dump in
// [`qflg_last_error`].
//
// # Safety
// `form` must be a live handle, `bounds` null (defaults) or readable,
// `kind` writable; `report` may be null.
enum QflgStatus qflg_verdict(const struct QflgForm *form,
                             const struct QflgBounds *bounds,
                             enum QflgVerdictKind *kind,
                             char **report);

// Runs a command-line invocation; `argv` excludes the program name.
// Returns the process exit code and stores stdout in `output`.
//
// # Safety
// `argv` must point to `argc` NUL-terminated strings; `output` must be
// writable or null.
int qflg_cli_run(int argc, const char *const *argv, char **output);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFLG_H */
