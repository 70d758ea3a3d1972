#include <math.h>
#include <stdio.h>
#include <string.h>

#include "cstrigger.h"

#define CHECK(expr)                                                        \
  do {                                                                     \
    if (!(expr)) {                                                         \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #expr,       \
              cst_last_error_message());                                   \
      return 1;                                                            \
    }                                                                      \
  } while (0)

static const char *CORPUS =
    "# pair = en ar\n\n"
    "# id = ahly\n"
    "every\tlang:en\ntime\tlang:en\nI\tlang:en\nwatch\tlang:en\nan\tlang:en\n"
    "ahly\tshared:ar\ngame\tlang:en\nI\tlang:en\nget\tlang:en\n"
    "goosebumps\tlang:en\nfel\tlang:ar\nde2i2a\tlang:ar\nel\tlang:ar\n74\tother\n\n";

int main(void) {
  CstCorpus *corpus = NULL;
  CHECK(cst_corpus_parse(CORPUS, NULL, NULL, &corpus) == CST_STATUS_OK);

  CstCorpusCounts counts;
  CHECK(cst_corpus_counts(corpus, &counts) == CST_STATUS_OK);
  CHECK(counts.tokens == 14 && counts.switches == 1);

  CstTestSpec spec = {CST_SHARED_TYPE_SHARED_L2, CST_DIRECTION_L1_TO_L2,
                      CST_MODE_PRECEDE, 5, CST_POLICY_EXCLUDE_RETURN, false};
  CstTable table;
  CHECK(cst_contingency(corpus, &spec, &table) == CST_STATUS_OK);
  CHECK(table.a == 1 && table.b == 4 && table.c == 0 && table.d == 7);

  CstTable worked = {216, 17515, 659, 143299};
  double rsp, p;
  CHECK(cst_rsp(&worked, &rsp) == CST_STATUS_OK && fabs(rsp - 2.2665) < 1e-3);
  CHECK(cst_fisher_exact(&worked, &p) == CST_STATUS_OK && p > 1e-30 && p < 5e-30);

  CstGrid *grid = NULL;
  CHECK(cst_grid_run(corpus, CST_SHARED_TYPE_ALL_SHARED, CST_POLICY_EXCLUDE_RETURN,
                     false, 0.05, &grid) == CST_STATUS_OK);
  char *svg = NULL;
  CHECK(cst_grid_render_svg(grid, false, &svg) == CST_STATUS_OK);
  CHECK(strstr(svg, "<svg") != NULL);
  cst_string_free(svg);

  const CstGrid *grids[1] = {grid};
  char *report = NULL;
  CHECK(cst_hypotheses_json(grids, 1, 0.05, &report) == CST_STATUS_OK);
  CHECK(strstr(report, "\"h1\"") != NULL);
  cst_string_free(report);

  CstCorpus *bad = NULL;
  CHECK(cst_corpus_parse("w\tlang:xx-bad\n", "en-es", NULL, &bad) == CST_STATUS_ERR_PARSE);
  CHECK(bad == NULL);
  CHECK(strlen(cst_last_error_message()) > 0);

  cst_grid_free(grid);
  cst_corpus_free(corpus);
  printf("ok\n");
  return 0;
}
