#ifndef CSTRIGGER_H
#define CSTRIGGER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CstStatus {
  CST_STATUS_OK = 0,
  CST_STATUS_ERR_NULL = 1,
  CST_STATUS_ERR_UTF8 = 2,
  CST_STATUS_ERR_PARSE = 3,
  CST_STATUS_ERR_INVALID_ARG = 4,
  /**
   * The requested value is not defined for this input (e.g. an RSP with an empty column).
   */
  CST_STATUS_ERR_UNDEFINED = 5,
  CST_STATUS_ERR_PANIC = 6,
} CstStatus;

typedef enum CstSharedType {
  CST_SHARED_TYPE_SHARED_L1 = 0,
  CST_SHARED_TYPE_SHARED_L2 = 1,
  CST_SHARED_TYPE_SHARED_OTHER = 2,
  CST_SHARED_TYPE_ALL_SHARED = 3,
} CstSharedType;

typedef enum CstDirection {
  CST_DIRECTION_L1_TO_L2 = 0,
  CST_DIRECTION_L2_TO_L1 = 1,
  CST_DIRECTION_BOTH = 2,
} CstDirection;

typedef enum CstMode {
  CST_MODE_PRECEDE = 0,
  CST_MODE_NEIGHBOR = 1,
} CstMode;

typedef enum CstPolicy {
  CST_POLICY_EXCLUDE_RETURN = 0,
  CST_POLICY_EXCLUDE_RETURN_SKIP_NEUTRAL = 1,
  CST_POLICY_KEEP_ALL = 2,
} CstPolicy;

/**
 * Opaque parsed corpus.
 */
typedef struct CstCorpus CstCorpus;

/**
 * Opaque grid result.
 */
typedef struct CstGrid CstGrid;

typedef struct CstCorpusCounts {
  uint64_t utterances;
  uint64_t tokens;
  uint64_t switches;
  uint64_t shared_items;
} CstCorpusCounts;

typedef struct CstTestSpec {
  enum CstSharedType shared_type;
  enum CstDirection direction;
  enum CstMode mode;
  uint32_t distance;
  enum CstPolicy policy;
  bool skip_neutral_items;
} CstTestSpec;

typedef struct CstTable {
  uint64_t a;
  uint64_t b;
  uint64_t c;
  uint64_t d;
} CstTable;

typedef struct CstCellResult {
  struct CstTable table;
  /**
   * NaN when `rsp_defined` is false.
   */
  double rsp;
  bool rsp_defined;
  double p_value;
  bool significant;
} CstCellResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next library call on the same thread.
 */
const char *cst_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cst_version(void);

/**
 * Parses a corpus from canonical-format text.
 *
 * `pair` (e.g. `"en-es"`) overrides the `# pair` header and may be null.
 * `mapping` holds `raw<TAB>tag` lines and may be null for canonical tags.
 *
 * # Safety
 * String arguments must be null or valid NUL-terminated strings; `out` must
 * be a valid pointer.
 */
enum CstStatus cst_corpus_parse(const char *text,
                                const char *pair,
                                const char *mapping,
                                struct CstCorpus **out);

/**
 * # Safety
 * `corpus` must be null or a handle from [`cst_corpus_parse`] not yet freed.
 */
void cst_corpus_free(struct CstCorpus *corpus);

/**
 * # Safety
 * `corpus` must be a live handle and `out` a valid pointer.
 */
enum CstStatus cst_corpus_counts(const struct CstCorpus *corpus, struct CstCorpusCounts *out);

/**
 * Writes the number of invariant violations (0 for a valid corpus).
 *
 * # Safety
 * `corpus` must be a live handle and `out` a valid pointer.
 */
enum CstStatus cst_corpus_validate(const struct CstCorpus *corpus, uint64_t *out_violations);

/**
 * # Safety
 * `corpus` must be a live handle; `spec` and `out` valid pointers.
 */
enum CstStatus cst_contingency(const struct CstCorpus *corpus,
                               const struct CstTestSpec *spec,
                               struct CstTable *out);

/**
 * Two-sided Fisher exact p-value.
 *
 * # Safety
 * `table` and `out_p` must be valid pointers.
 */
enum CstStatus cst_fisher_exact(const struct CstTable *table, double *out_p);

/**
 * Relative switching propensity; `CST_STATUS_ERR_UNDEFINED` when a rate is undefined or zero.
 *
 * # Safety
 * `table` and `out` must be valid pointers.
 */
enum CstStatus cst_rsp(const struct CstTable *table, double *out);

/**
 * Runs the full 3 × 2 × 6 grid for one shared type.
 *
 * # Safety
 * `corpus` must be a live handle and `out` a valid pointer.
 */
enum CstStatus cst_grid_run(const struct CstCorpus *corpus,
                            enum CstSharedType shared_type,
                            enum CstPolicy policy,
                            bool skip_neutral_items,
                            double alpha,
                            struct CstGrid **out);

/**
 * Loads a grid previously serialized with [`cst_grid_to_json`].
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum CstStatus cst_grid_from_json(const char *json, struct CstGrid **out);

/**
 * # Safety
 * `grid` must be null or a live grid handle.
 */
void cst_grid_free(struct CstGrid *grid);

/**
 * # Safety
 * `grid` must be a live handle and `out` a valid pointer.
 */
enum CstStatus cst_grid_cell(const struct CstGrid *grid,
                             enum CstDirection direction,
                             enum CstMode mode,
                             uint32_t distance,
                             struct CstCellResult *out);

/**
 * Serializes a grid; free the string with [`cst_string_free`].
 *
 * # Safety
 * `grid` must be a live handle and `out` a valid pointer.
 */
enum CstStatus cst_grid_to_json(const struct CstGrid *grid, char **out);

/**
 * Renders the grid as SVG; free the string with [`cst_string_free`].
 *
 * # Safety
 * `grid` must be a live handle and `out` a valid pointer.
 */
enum CstStatus cst_grid_render_svg(const struct CstGrid *grid, bool log_y, char **out);

/**
 * Aggregate hypothesis report over `count` grids, as JSON.
 *
 * # Safety
 * `grids` must point to `count` live grid handles and `out` be a valid pointer.
 */
enum CstStatus cst_hypotheses_json(const struct CstGrid *const *grids,
                                   size_t count,
                                   double alpha,
                                   char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void cst_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSTRIGGER_H */
