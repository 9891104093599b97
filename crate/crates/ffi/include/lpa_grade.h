#ifndef LPA_GRADE_H
#define LPA_GRADE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which monoid question [`lpa_monoid_check_json`] asks.
 */
typedef enum LpaMonoidCheck {
  LPA_MONOID_CHECK_PERIODIC = 0,
  LPA_MONOID_CHECK_EQUIV = 1,
  LPA_MONOID_CHECK_LEQ = 2,
  LPA_MONOID_CHECK_STRONG_UNIT = 3,
} LpaMonoidCheck;

typedef enum LpaStatus {
  LPA_STATUS_OK = 0,
  LPA_STATUS_NULL_POINTER = 1,
  LPA_STATUS_INVALID_UTF8 = 2,
  LPA_STATUS_PARSE_ERROR = 3,
  LPA_STATUS_RESOURCE_LIMIT = 4,
  LPA_STATUS_INVALID_INPUT = 5,
  LPA_STATUS_INTERNAL = 6,
} LpaStatus;

/**
 * A parsed finite directed graph.
 */
typedef struct LpaGraph LpaGraph;

/**
 * The classification verdicts as plain flags.
 */
typedef struct LpaClassification {
  bool no_sinks;
  bool no_exit;
  bool edl;
  bool strongly_graded;
  bool crossed_product;
  bool skew_group_ring;
  bool group_ring;
  bool graded_unit_regular;
} LpaClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next `lpa_*` call on the same thread.
 */
const char *lpa_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lpa_version(void);

/**
 * Parses the textual graph format. In strict mode every edge endpoint must
 * be declared with a `vertex` line.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a writable pointer.
 */
enum LpaStatus lpa_graph_parse(const char *text, bool strict, struct LpaGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from [`lpa_graph_parse`] not yet freed.
 */
void lpa_graph_free(struct LpaGraph *g);

/**
 * # Safety
 * `g` must be null or a live handle. Returns 0 for null.
 */
size_t lpa_graph_vertex_count(const struct LpaGraph *g);

/**
 * # Safety
 * `g` must be null or a live handle. Returns 0 for null.
 */
size_t lpa_graph_edge_count(const struct LpaGraph *g);

/**
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum LpaStatus lpa_classify_flags(const struct LpaGraph *g, struct LpaClassification *out);

/**
 * Full classification report with witnesses, as JSON.
 *
 * # Safety
 * `g` must be a live handle and `out` writable. Free the result with
 * [`lpa_string_free`].
 */
enum LpaStatus lpa_classify_json(const struct LpaGraph *g, char **out);

/**
 * Graded matricial representation of a no-exit graph, as JSON.
 *
 * # Safety
 * As for [`lpa_classify_json`].
 */
enum LpaStatus lpa_matricial_json(const struct LpaGraph *g, bool canonical, char **out);

/**
 * Graded K_0 presentation of a no-exit graph, as JSON.
 *
 * # Safety
 * As for [`lpa_classify_json`].
 */
enum LpaStatus lpa_ktheory_json(const struct LpaGraph *g, char **out);

/**
 * DOT rendering of the graph.
 *
 * # Safety
 * As for [`lpa_classify_json`].
 */
enum LpaStatus lpa_dot(const struct LpaGraph *g, char **out);

/**
 * Classifies `M_n(K[Gamma])(d)` given as JSON
 * `{"rank": r, "support": [[..]], "shifts": [[..]]}`.
 *
 * # Safety
 * `input` must be a NUL-terminated string and `out` writable.
 */
enum LpaStatus lpa_matrix_ring_json(const char *input, char **out);

/**
 * Runs a bounded monoid oracle with default bounds and returns the outcome
 * (a certificate or `unknown`) as JSON. `element2` is required for
 * `Equiv` and `Leq` and ignored otherwise; it may be null.
 *
 * # Safety
 * `g` must be a live handle, `element` a NUL-terminated string, `element2`
 * null or NUL-terminated, and `out` writable.
 */
enum LpaStatus lpa_monoid_check_json(const struct LpaGraph *g,
                                     enum LpaMonoidCheck check,
                                     const char *element,
                                     const char *element2,
                                     char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void lpa_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LPA_GRADE_H */
