#ifndef TSPACES_H
#define TSPACES_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum TsStatus {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_POINTER = 1,
  TS_STATUS_INVALID_UTF8 = 2,
  TS_STATUS_PARSE = 3,
  TS_STATUS_BAD_FIELD = 4,
  TS_STATUS_BAD_SPACE = 5,
  TS_STATUS_FIELD_MISMATCH = 6,
  TS_STATUS_UNSUPPORTED = 7,
  TS_STATUS_TOO_LARGE = 8,
  TS_STATUS_IO = 9,
  TS_STATUS_PANIC = 10,
} TsStatus;

typedef enum TsVerdict {
  TS_VERDICT_MEMBER = 0,
  TS_VERDICT_NON_MEMBER = 1,
  TS_VERDICT_UNKNOWN = 2,
} TsVerdict;

typedef struct TsField TsField;

typedef struct TsPoly TsPoly;

typedef struct TsSpace TsSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// Valid until the next call on the same thread.
const char *ts_last_error(void);

const char *ts_version(void);

// # Safety
// `s` must come from this library or be null.
void ts_string_free(char *s);

// GF(q) with the default modulus.
//
// # Safety
// `out` must be valid for writes.
enum TsStatus ts_field_new(uint64_t q, struct TsField **out);

// # Safety
// `f` must come from [`ts_field_new`] or be null.
void ts_field_free(struct TsField *f);

// # Safety
// `f` must be a live field handle.
uint64_t ts_field_order(const struct TsField *f);

// Parses a polynomial in `k[x]_0`, or in `k[x]` when `unitary` is set.
//
// # Safety
// `f` must be a live field handle, `text` a nul-terminated string and
// `out` valid for writes.
enum TsStatus ts_poly_parse(const struct TsField *f,
                            const char *text,
                            bool unitary,
                            struct TsPoly **out);

// # Safety
// `p` must come from this library or be null.
void ts_poly_free(struct TsPoly *p);

// Canonical text form; free with [`ts_string_free`].
//
// # Safety
// `p` must be a live polynomial handle and `out` valid for writes.
enum TsStatus ts_poly_to_text(const struct TsPoly *p, char **out);

// A space such as `W:1`, `V:0+V:1` or `W0`.
//
// # Safety
// `f` must be a live field handle, `names` a nul-terminated string and
// `out` valid for writes.
enum TsStatus ts_space_parse(const struct TsField *f, const char *names, struct TsSpace **out);

// # Safety
// `s` must come from this library or be null.
void ts_space_free(struct TsSpace *s);

// Decides membership of `p` in `s`. When `out_cert` is not null it
// receives the certificate as JSON.
//
// # Safety
// Handles must be live; `out_verdict` must be valid for writes and
// `out_cert` null or valid for writes.
enum TsStatus ts_member(const struct TsSpace *s,
                        const struct TsPoly *p,
                        uint64_t cutoff,
                        enum TsVerdict *out_verdict,
                        char **out_cert);

// Whether `x` lies in `s`, i.e. `s` is all of `k[x]_0`.
//
// # Safety
// As for [`ts_member`].
enum TsStatus ts_covers(const struct TsSpace *s,
                        uint64_t cutoff,
                        enum TsVerdict *out_verdict,
                        char **out_cert);

// Canonical form of `p` modulo `W1` or `W2` over GF(2).
//
// # Safety
// `p` must be a live handle, `target` a nul-terminated string and `out`
// valid for writes.
enum TsStatus ts_reduce(const struct TsPoly *p, const char *target, struct TsPoly **out);

// Replays a derivation script given as JSON text. `out_report`, when not
// null, receives the step-by-step report.
//
// # Safety
// `script` must be a nul-terminated string; `out_passed` valid for
// writes; `out_report` null or valid for writes.
enum TsStatus ts_replay(const char *script, bool *out_passed, char **out_report);

// Validates a certificate JSON without searching. `out_valid` is false
// and [`ts_last_error`] empty when the certificate parses but is wrong;
// `out_reason` then receives why.
//
// # Safety
// `cert` must be a nul-terminated string; `out_valid` valid for writes;
// `out_reason` null or valid for writes.
enum TsStatus ts_check_certificate(const char *cert, bool *out_valid, char **out_reason);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSPACES_H */
