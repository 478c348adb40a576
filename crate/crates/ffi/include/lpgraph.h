#ifndef LPGRAPH_H
#define LPGRAPH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum LpgError {
  LPG_ERROR_OK = 0,
  LPG_ERROR_NULL_POINTER = 1,
  LPG_ERROR_INVALID_UTF8 = 2,
  LPG_ERROR_PARSE = 3,
  LPG_ERROR_COMPUTE = 4,
  LPG_ERROR_REPLAY_FAILED = 5,
  LPG_ERROR_PANIC = 6,
} LpgError;

// Certificate status as an integer.
typedef enum LpgStatus {
  LPG_STATUS_UNKNOWN = 0,
  LPG_STATUS_CONDITIONAL = 1,
  LPG_STATUS_PROVEN = 2,
} LpgStatus;

// Opaque certificate handle.
typedef struct LpgCertificate LpgCertificate;

// Opaque graph handle.
typedef struct LpgGraph LpgGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on this thread.
const char *lpg_last_error_message(void);

// Library version as a static string.
const char *lpg_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not be freed twice.
void lpg_string_free(char *s);

// Parses a graph in the text or JSON format.
//
// # Safety
// `text` must be a nul-terminated string and `out` a valid pointer.
enum LpgError lpg_graph_parse(const char *text, struct LpgGraph **out);

// # Safety
// `g` must come from [`lpg_graph_parse`] and not be freed twice.
void lpg_graph_free(struct LpgGraph *g);

// # Safety
// `g` must be a live graph handle and `n`, `m` valid pointers.
enum LpgError lpg_graph_size(const struct LpgGraph *g, size_t *n, size_t *m);

// Certifies `g` with the circle profile in dimension `d`. A graph that
// cannot be certified still succeeds, with status `Unknown`.
//
// # Safety
// `g` must be a live graph handle and `out` a valid pointer.
enum LpgError lpg_certify(const struct LpgGraph *g, uint32_t d, struct LpgCertificate **out);

// # Safety
// `c` must come from this library and not be freed twice.
void lpg_certificate_free(struct LpgCertificate *c);

// # Safety
// `c` must be a live certificate handle and `out` a valid pointer.
enum LpgError lpg_certificate_status(const struct LpgCertificate *c, enum LpgStatus *out);

// Exact exponent sum as a rational string such as `"5/3"`. Release it
// with [`lpg_string_free`].
//
// # Safety
// `c` must be a live certificate handle and `out` a valid pointer.
enum LpgError lpg_certificate_sum(const struct LpgCertificate *c, char **out);

// Certificate JSON. Release it with [`lpg_string_free`].
//
// # Safety
// `c` must be a live certificate handle and `out` a valid pointer.
enum LpgError lpg_certificate_to_json(const struct LpgCertificate *c, char **out);

// # Safety
// `json` must be a nul-terminated string and `out` a valid pointer.
enum LpgError lpg_certificate_from_json(const char *json, struct LpgCertificate **out);

// Re-checks every step of a certificate in exact arithmetic. Returns
// `ReplayFailed` with the offending step in the error message.
//
// # Safety
// `c` must be a live certificate handle.
enum LpgError lpg_certificate_replay(const struct LpgCertificate *c);

// Numerical rank of the rigidity matrix at `xy = [x1, y1, x2, y2, …]`
// (`len = 2n`).
//
// # Safety
// `g` must be a live graph handle, `xy` must point to `len` doubles and
// `rank` must be a valid pointer.
enum LpgError lpg_rigidity_rank(const struct LpgGraph *g,
                                const double *xy,
                                size_t len,
                                size_t *rank);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPGRAPH_H */
