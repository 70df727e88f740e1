#ifndef DDESTAB_H
#define DDESTAB_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(DDESTAB_BUILDING)
#    define DDESTAB_API __declspec(dllexport)
#  else
#    define DDESTAB_API __declspec(dllimport)
#  endif
#else
#  define DDESTAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ddestab_status {
  DDESTAB_OK = 0,
  DDESTAB_ERR_INVALID_ARGUMENT = 1,
  DDESTAB_ERR_PARSE = 2,
  DDESTAB_ERR_IO = 3,
  DDESTAB_ERR_NUMERICAL = 4,
  DDESTAB_ERR_INTERNAL = 5
} ddestab_status;

typedef enum ddestab_verdict {
  DDESTAB_UNCONDITIONALLY_STABLE = 0,
  DDESTAB_STABLE_FOR_THIS_STEP = 1,
  DDESTAB_UNCERTIFIED = 2,
  DDESTAB_CERTIFIED_UNSTABLE = 3
} ddestab_verdict;

typedef struct ddestab_matrix ddestab_matrix;
typedef struct ddestab_report ddestab_report;
typedef struct ddestab_run ddestab_run;

typedef struct ddestab_scheme {
  double theta;
  double u;
  int m;
  double tau;
} ddestab_scheme;

/* Message of the last failed call on this thread; never NULL. */
DDESTAB_API const char* ddestab_last_error(void);
DDESTAB_API const char* ddestab_version(void);

/* Strings returned through char** out parameters are owned by the caller. */
DDESTAB_API void ddestab_string_free(char* s);

/* Matrices. im may be NULL for a real matrix; data is row-major. */
DDESTAB_API ddestab_status ddestab_matrix_create(int rows, int cols, const double* re,
                                                 const double* im, ddestab_matrix** out);
DDESTAB_API ddestab_status ddestab_matrix_parse(const char* json, ddestab_matrix** out);
DDESTAB_API ddestab_status ddestab_matrix_load(const char* path, ddestab_matrix** out);
DDESTAB_API ddestab_status ddestab_matrix_save(const ddestab_matrix* m, const char* path);
DDESTAB_API ddestab_status ddestab_matrix_to_json(const ddestab_matrix* m, char** out);
/* "example31-a", "example31-b", "example1-a", "example1-b" (M = 100, l = -0.1). */
DDESTAB_API ddestab_status ddestab_matrix_builtin(const char* name, ddestab_matrix** out);
DDESTAB_API int ddestab_matrix_rows(const ddestab_matrix* m);
DDESTAB_API int ddestab_matrix_cols(const ddestab_matrix* m);
DDESTAB_API ddestab_status ddestab_matrix_get(const ddestab_matrix* m, int i, int j, double* re,
                                              double* im);
DDESTAB_API void ddestab_matrix_free(ddestab_matrix* m);

/* Stability of y' = -Ay + By(t - tau) under the theta-method. */
typedef struct ddestab_check_options {
  const double* p_grid; /* NULL selects {0, 1, 2} */
  size_t n_p;
  size_t n_angles;   /* 0 selects 256 */
  size_t oracle_cap; /* 0 selects 5000 */
} ddestab_check_options;

DDESTAB_API ddestab_status ddestab_check(const ddestab_matrix* a, const ddestab_matrix* b,
                                         ddestab_scheme scheme,
                                         const ddestab_check_options* options,
                                         ddestab_report** out);
DDESTAB_API ddestab_verdict ddestab_report_verdict(const ddestab_report* r);
/* 1 when a check failed numerically. */
DDESTAB_API int ddestab_report_has_failure(const ddestab_report* r);
DDESTAB_API ddestab_status ddestab_report_json(const ddestab_report* r, char** out);
DDESTAB_API void ddestab_report_free(ddestab_report* r);

DDESTAB_API ddestab_status ddestab_in_dy(double mu_re, double mu_im, double y,
                                         ddestab_scheme scheme, int* inside, double* margin);
DDESTAB_API ddestab_status ddestab_spectral_radius_w(const ddestab_matrix* a,
                                                     const ddestab_matrix* b,
                                                     ddestab_scheme scheme, double* rho);
DDESTAB_API ddestab_status ddestab_numerical_radius(const ddestab_matrix* m, size_t n_angles,
                                                    double* lower, double* upper);

/* CSV of the region boundary (alpha,re,im); needs u = 0 and y < 0. */
DDESTAB_API ddestab_status ddestab_region_csv(ddestab_scheme scheme, double y, size_t n,
                                              char** out);
/* CSV of the FOV boundary (angle,re,im) of a, or of A^{p/2-1} B A^{-p/2} when b
   is not NULL. */
DDESTAB_API ddestab_status ddestab_fov_csv(const ddestab_matrix* a, const ddestab_matrix* b,
                                           double p, size_t n_angles, char** out);

/* Builtin problems. Start from ddestab_solve_defaults; tau <= 0 and t_end <= 0
   select the problem's own values. */
typedef struct ddestab_solve_options {
  const char* problem; /* "example1" or "example2" */
  int grid_m;
  double lambda1;
  double lambda2;
  double l;
  double lambda;
  double reaction_mu;
  double tau;
  double theta;
  double u;
  int m;
  double t_end;
  int keep_states;
  int zero_history;
} ddestab_solve_options;

DDESTAB_API ddestab_solve_options ddestab_solve_defaults(const char* problem);
DDESTAB_API ddestab_status ddestab_solve_builtin(const ddestab_solve_options* options,
                                                 ddestab_run** out);
/* Linear system with a constant history vector of length N. */
DDESTAB_API ddestab_status ddestab_solve_linear(const ddestab_matrix* a, const ddestab_matrix* b,
                                                ddestab_scheme scheme, double t_end,
                                                const double* history_re,
                                                const double* history_im, int keep_states,
                                                ddestab_run** out);
DDESTAB_API ddestab_status ddestab_run_summary_json(const ddestab_run* run, char** out);
DDESTAB_API ddestab_status ddestab_run_trajectory_csv(const ddestab_run* run, int norm_only,
                                                      char** out);
DDESTAB_API ddestab_status ddestab_run_snapshot_csv(const ddestab_run* run, char** out);
DDESTAB_API size_t ddestab_run_steps(const ddestab_run* run);
DDESTAB_API double ddestab_run_final_norm(const ddestab_run* run);
DDESTAB_API int ddestab_run_diverged(const ddestab_run* run);
DDESTAB_API void ddestab_run_free(ddestab_run* run);

DDESTAB_API ddestab_status ddestab_problem_summary_json(const ddestab_solve_options* options,
                                                        char** out);

/* Target: "table1", "example31", "example2-condition", "figures" or "all".
   *passed is 1 when every comparison holds; *table gets the pass/fail matrix. */
DDESTAB_API ddestab_status ddestab_reproduce(const char* target, int full, const char* out_dir,
                                             char** table, int* passed);

#ifdef __cplusplus
}
#endif

#endif
