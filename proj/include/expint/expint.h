#ifndef EXPINT_EXPINT_H
#define EXPINT_EXPINT_H

#include <stddef.h>
#include <stdint.h>

#if defined(EXPINT_BUILDING_LIBRARY)
#define EXPINT_API __attribute__((visibility("default")))
#else
#define EXPINT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum expint_status {
  EXPINT_OK = 0,
  EXPINT_ERR_INVALID_ARGUMENT = 1,
  EXPINT_ERR_DOMAIN = 2,
  EXPINT_ERR_RANGE = 3,
  EXPINT_ERR_RESOURCE = 4,
  EXPINT_ERR_FORMAT = 5,
  EXPINT_ERR_IO = 6,
  EXPINT_ERR_INTERNAL = 7
} expint_status;

typedef enum expint_format {
  EXPINT_FORMAT_HUMAN = 0,
  EXPINT_FORMAT_MACHINE = 1, /* single-line JSON document */
  EXPINT_FORMAT_RECORD = 2   /* tab-separated key=value record */
} expint_format;

typedef struct expint_options expint_options;
typedef struct expint_run expint_run;
typedef struct expint_martingale expint_martingale;

typedef struct expint_report_info {
  const char* check_name;
  uint64_t samples;
  double min_margin;
  double tolerance;
  int passed;
  int gating;
  double elapsed_ms;
} expint_report_info;

EXPINT_API const char* expint_version(void);
EXPINT_API const char* expint_status_string(expint_status status);
/* Message of the last failed call on the calling thread; "" if none. */
EXPINT_API const char* expint_last_error(void);
/* Worker count from EXPINT_JOBS, else the hardware concurrency. */
EXPINT_API int expint_default_jobs(void);
EXPINT_API void expint_string_free(char* s);

/* Special functions by name. Names and arities:
 *   inv_mills k k1 k2 inv_k1 F logF F1 F2 G G1 G2 M(x,y) N(p,t) N_t N_tt N_p N_pp
 *   N_sup(p,t) N_sup_tt N_sup_residual bound_rhs(x,R)
 * k1, k2 are k' and k''; F1, F2 and G1, G2 are first and second derivatives. */
EXPINT_API expint_status expint_eval(const char* name, const double* args, size_t nargs, double* out);
/* Arity of a function name, or 0 if unknown. */
EXPINT_API size_t expint_function_arity(const char* name);
/* Error bound of the value returned by expint_eval for the same arguments
 * (table bound for F and G, rounding-level estimate otherwise). */
EXPINT_API expint_status expint_eval_error_bound(const char* name, const double* args, size_t nargs, double* out);
/* Writes the F or G interpolation table in the versioned text format. */
EXPINT_API expint_status expint_table_export(const char* name, const char* path);

EXPINT_API expint_status expint_options_create(expint_options** out);
EXPINT_API void expint_options_destroy(expint_options* opts);
EXPINT_API expint_status expint_options_set_seed(expint_options* opts, uint64_t seed);
EXPINT_API expint_status expint_options_set_samples(expint_options* opts, uint64_t samples);
EXPINT_API expint_status expint_options_set_nodes(expint_options* opts, int nodes);
EXPINT_API expint_status expint_options_set_depth(expint_options* opts, int depth);
EXPINT_API expint_status expint_options_set_jobs(expint_options* opts, int jobs);
EXPINT_API expint_status expint_options_set_brownian_paths(expint_options* opts, uint64_t paths);
/* Unknown names are rejected with EXPINT_ERR_INVALID_ARGUMENT. */
EXPINT_API expint_status expint_options_set_tolerance(expint_options* opts, const char* name, double value);
EXPINT_API expint_status expint_options_get_tolerance(const expint_options* opts, const char* name, double* out);
/* Comma-separated list of tolerance names; owned by the library. */
EXPINT_API const char* expint_tolerance_names(void);

/* Suites: kernel, verify, flow, martingale, scan, all. */
EXPINT_API int expint_is_suite(const char* name);
EXPINT_API expint_status expint_run_suite(const char* suite, const expint_options* opts, expint_run** out);
EXPINT_API void expint_run_destroy(expint_run* run);
/* 1 iff every gating report passed. */
EXPINT_API int expint_run_passed(const expint_run* run);
EXPINT_API size_t expint_run_report_count(const expint_run* run);
/* Strings stay valid until the run is destroyed. */
EXPINT_API expint_status expint_run_report_info(const expint_run* run, size_t index, expint_report_info* out);
EXPINT_API expint_status expint_run_report_text(const expint_run* run, size_t index, expint_format format,
                                                int include_timing, const char** out);
EXPINT_API size_t expint_run_export_count(const expint_run* run);
EXPINT_API expint_status expint_run_export(const expint_run* run, size_t index, const char** stem,
                                           const char** text);

/* Laws: "lognormal_leaves", "bounded_ratio". */
EXPINT_API expint_status expint_martingale_random(int depth, uint64_t seed, const char* law,
                                                  expint_martingale** out);
EXPINT_API expint_status expint_martingale_from_leaves(const double* leaves, size_t count, expint_martingale** out);
EXPINT_API expint_status expint_martingale_parse(const char* text, expint_martingale** out);
EXPINT_API void expint_martingale_destroy(expint_martingale* m);
EXPINT_API int expint_martingale_depth(const expint_martingale* m);
EXPINT_API size_t expint_martingale_leaf_count(const expint_martingale* m);
/* Copies up to capacity leaves; returns the number copied. */
EXPINT_API size_t expint_martingale_leaves(const expint_martingale* m, double* out, size_t capacity);
/* Per-leaf quadratic variation, same layout as the leaves. */
EXPINT_API size_t expint_martingale_quadratic_variation(const expint_martingale* m, double* out, size_t capacity);
/* Caller frees *out with expint_string_free. */
EXPINT_API expint_status expint_martingale_serialize(const expint_martingale* m, char** out);
/* Main bound, log bounds, both Bellman inductions, tree identities. */
EXPINT_API expint_status expint_martingale_check(const expint_martingale* m, const expint_options* opts,
                                                 expint_run** out);
/* Batch over a manifest of "depth seed law" lines. */
EXPINT_API expint_status expint_martingale_manifest(const char* text, const expint_options* opts, expint_run** out);

#ifdef __cplusplus
}
#endif

#endif
