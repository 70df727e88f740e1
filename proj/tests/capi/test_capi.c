/* Exercises the shared library through its C interface only. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "ddestab.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, \
              #cond);                                             \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void test_matrices(void) {
  const double re[4] = {1.0, 2.0, 3.0, 4.0};
  const double im[4] = {0.0, 0.5, 0.0, -0.5};
  ddestab_matrix* m = NULL;
  EXPECT(ddestab_matrix_create(2, 2, re, im, &m) == DDESTAB_OK);
  EXPECT(ddestab_matrix_rows(m) == 2 && ddestab_matrix_cols(m) == 2);

  char* json = NULL;
  EXPECT(ddestab_matrix_to_json(m, &json) == DDESTAB_OK);
  ddestab_matrix* back = NULL;
  EXPECT(ddestab_matrix_parse(json, &back) == DDESTAB_OK);
  double r = 0.0, i = 0.0;
  EXPECT(ddestab_matrix_get(back, 0, 1, &r, &i) == DDESTAB_OK);
  EXPECT(r == 2.0 && i == 0.5);
  EXPECT(ddestab_matrix_get(back, 2, 0, &r, &i) == DDESTAB_ERR_INVALID_ARGUMENT);
  ddestab_string_free(json);
  ddestab_matrix_free(back);
  ddestab_matrix_free(m);

  ddestab_matrix* bad = NULL;
  EXPECT(ddestab_matrix_parse("{\"rows\": 1}", &bad) == DDESTAB_ERR_PARSE);
  EXPECT(bad == NULL);
  EXPECT(strlen(ddestab_last_error()) > 0);
  EXPECT(ddestab_matrix_load("/nonexistent/file.json", &bad) == DDESTAB_ERR_IO);
  EXPECT(ddestab_matrix_builtin("no-such-matrix", &bad) == DDESTAB_ERR_INVALID_ARGUMENT);
  EXPECT(ddestab_matrix_create(0, 2, re, NULL, &bad) == DDESTAB_ERR_INVALID_ARGUMENT);
}

static void test_example31(void) {
  ddestab_matrix *a = NULL, *b = NULL;
  EXPECT(ddestab_matrix_builtin("example31-a", &a) == DDESTAB_OK);
  EXPECT(ddestab_matrix_builtin("example31-b", &b) == DDESTAB_OK);

  ddestab_scheme coarse = {1.0, 0.0, 2, 1.0};
  ddestab_scheme fine = {1.0, 0.0, 50, 1.0};
  ddestab_report* r = NULL;
  EXPECT(ddestab_check(a, b, coarse, NULL, &r) == DDESTAB_OK);
  EXPECT(ddestab_report_verdict(r) == DDESTAB_STABLE_FOR_THIS_STEP);
  EXPECT(ddestab_report_has_failure(r) == 0);
  char* json = NULL;
  EXPECT(ddestab_report_json(r, &json) == DDESTAB_OK);
  EXPECT(strstr(json, "\"verdict\": \"StableForThisStep\"") != NULL);
  ddestab_string_free(json);
  ddestab_report_free(r);

  EXPECT(ddestab_check(a, b, fine, NULL, &r) == DDESTAB_OK);
  EXPECT(ddestab_report_verdict(r) == DDESTAB_CERTIFIED_UNSTABLE);
  ddestab_report_free(r);

  double rho = 0.0;
  EXPECT(ddestab_spectral_radius_w(a, b, coarse, &rho) == DDESTAB_OK);
  EXPECT(fabs(rho - 0.981980506) < 1e-8);
  EXPECT(ddestab_spectral_radius_w(a, b, fine, &rho) == DDESTAB_OK);
  EXPECT(rho >= 1.0);

  ddestab_scheme invalid = {2.0, 0.0, 2, 1.0};
  EXPECT(ddestab_check(a, b, invalid, NULL, &r) == DDESTAB_ERR_INVALID_ARGUMENT);

  double history[3] = {1.0, 1.0, 1.0};
  ddestab_run* run = NULL;
  EXPECT(ddestab_solve_linear(a, b, coarse, 1000.0, history, NULL, 0, &run) == DDESTAB_OK);
  EXPECT(ddestab_run_steps(run) == 2000);
  EXPECT(ddestab_run_final_norm(run) < 1e-3);
  EXPECT(ddestab_run_diverged(run) == 0);
  ddestab_run_free(run);

  ddestab_matrix_free(a);
  ddestab_matrix_free(b);
}

static void test_regions(void) {
  ddestab_scheme s = {1.0, 0.0, 2, 1.0};
  int inside = -1;
  double margin = 0.0;
  EXPECT(ddestab_in_dy(0.0, 0.0, -1.0, s, &inside, &margin) == DDESTAB_OK);
  EXPECT(inside == 1 && fabs(margin - 0.5) < 1e-12);
  EXPECT(ddestab_in_dy(0.0, 0.0, -INFINITY, s, &inside, &margin) == DDESTAB_OK);
  EXPECT(inside == 1);

  char* csv = NULL;
  EXPECT(ddestab_region_csv(s, -2.0, 64, &csv) == DDESTAB_OK);
  EXPECT(strncmp(csv, "alpha,re,im\n", 12) == 0);
  ddestab_string_free(csv);
  EXPECT(ddestab_region_csv(s, 1.0, 64, &csv) == DDESTAB_ERR_INVALID_ARGUMENT);

  const double re[4] = {0.0, 1.0, 0.0, 0.0};
  ddestab_matrix* j = NULL;
  EXPECT(ddestab_matrix_create(2, 2, re, NULL, &j) == DDESTAB_OK);
  double lo = 0.0, hi = 0.0;
  EXPECT(ddestab_numerical_radius(j, 0, &lo, &hi) == DDESTAB_OK);
  EXPECT(lo <= 0.5 + 1e-12 && hi >= 0.5 && hi - lo < 1e-3);
  EXPECT(ddestab_fov_csv(j, NULL, 0.0, 16, &csv) == DDESTAB_OK);
  EXPECT(strncmp(csv, "angle,re,im\n", 12) == 0);
  ddestab_string_free(csv);
  ddestab_matrix_free(j);
}

static void test_builtin_runs(void) {
  ddestab_solve_options o = ddestab_solve_defaults("example2");
  o.grid_m = 10;
  o.t_end = 2.0;
  ddestab_run* run = NULL;
  EXPECT(ddestab_solve_builtin(&o, &run) == DDESTAB_OK);
  char* summary = NULL;
  EXPECT(ddestab_run_summary_json(run, &summary) == DDESTAB_OK);
  EXPECT(strstr(summary, "\"max_norm_le_1\": true") != NULL);
  ddestab_string_free(summary);
  char* snap = NULL;
  EXPECT(ddestab_run_snapshot_csv(run, &snap) == DDESTAB_OK);
  EXPECT(strncmp(snap, "x,y,value\n", 10) == 0);
  ddestab_string_free(snap);
  ddestab_run_free(run);

  o.problem = "example7";
  EXPECT(ddestab_solve_builtin(&o, &run) == DDESTAB_ERR_INVALID_ARGUMENT);

  char* table = NULL;
  int passed = 0;
  EXPECT(ddestab_reproduce("example31", 0, NULL, &table, &passed) == DDESTAB_OK);
  EXPECT(passed == 1);
  EXPECT(strstr(table, "PASS") != NULL);
  ddestab_string_free(table);
  EXPECT(ddestab_reproduce("bogus", 0, NULL, &table, &passed) == DDESTAB_ERR_INVALID_ARGUMENT);
}

int main(void) {
  EXPECT(strlen(ddestab_version()) > 0);
  test_matrices();
  test_example31();
  test_regions();
  test_builtin_runs();
  if (failures) {
    fprintf(stderr, "%d C API checks failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
