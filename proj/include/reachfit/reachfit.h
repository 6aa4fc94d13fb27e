#ifndef REACHFIT_REACHFIT_H
#define REACHFIT_REACHFIT_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(REACHFIT_BUILDING)
#    define RF_API __declspec(dllexport)
#  else
#    define RF_API __declspec(dllimport)
#  endif
#else
#  define RF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rf_status {
  RF_OK = 0,
  RF_ERR_DEGENERATE_INPUT,
  RF_ERR_BAD_SAMPLING,
  RF_ERR_BAD_CUTOFF,
  RF_ERR_TOO_SHORT,
  RF_ERR_DEGENERATE_PROFILE,
  RF_ERR_MISSING_DATA,
  RF_ERR_INSUFFICIENT_INLIERS,
  RF_ERR_NOT_AN_ELLIPSE,
  RF_ERR_BAD_DURATION,
  RF_ERR_OUT_OF_RANGE,
  RF_ERR_DEGENERATE_LINE,
  RF_ERR_NO_CONIC_POINT_IN_RANGE,
  RF_ERR_TOO_FEW_TRIALS,
  RF_ERR_DEGENERATE_DATA,
  RF_ERR_BAD_SPEC,
  RF_ERR_PARSE,
  RF_ERR_VALIDATION,
  RF_ERR_CONFIG,
  RF_ERR_IO,
  RF_ERR_INVALID_ARGUMENT,
  RF_ERR_INTERNAL
} rf_status;

typedef struct rf_config rf_config;
typedef struct rf_dataset rf_dataset;
typedef struct rf_results rf_results;

typedef enum rf_model { RF_MODEL_CONIC = 0, RF_MODEL_DMJ = 1, RF_MODEL_MJ = 2 } rf_model;
typedef enum rf_conic_class {
  RF_CONIC_ELLIPSE = 0,
  RF_CONIC_HYPERBOLA = 1,
  RF_CONIC_PARABOLA = 2
} rf_conic_class;

typedef enum rf_format {
  RF_FORMAT_ALL = 0,
  RF_FORMAT_JSON,
  RF_FORMAT_CSV,
  RF_FORMAT_MARKDOWN
} rf_format;

/* Message of the last failure on the calling thread; empty after success. */
RF_API const char* rf_last_error(void);
RF_API const char* rf_status_string(rf_status status);
RF_API const char* rf_version(void);

/* Configuration. Defaults match the published analysis settings. */
RF_API rf_status rf_config_create(rf_config** out);
RF_API rf_status rf_config_load(const char* path, rf_config** out);
RF_API rf_status rf_config_set(rf_config* cfg, const char* key, const char* value);
/* Writes the serialized config (NUL terminated, truncated to `size`) and
 * stores the buffer size it needs, terminator included, in `*needed` when
 * non-null. */
RF_API rf_status rf_config_serialize(const rf_config* cfg, char* buf, size_t size,
                                     size_t* needed);
RF_API void rf_config_free(rf_config* cfg);

/* Trials from a file in a registered format ("canonical"). */
RF_API rf_status rf_dataset_load(const char* path, const char* format, rf_dataset** out);
RF_API size_t rf_dataset_trial_count(const rf_dataset* data);
RF_API size_t rf_dataset_exclusion_count(const rf_dataset* data);
RF_API const char* rf_dataset_exclusion_id(const rf_dataset* data, size_t index);
RF_API const char* rf_dataset_exclusion_reason(const rf_dataset* data, size_t index);
RF_API void rf_dataset_free(rf_dataset* data);

RF_API rf_status rf_analyze(const rf_dataset* data, const rf_config* cfg, rf_results** out);
/* `format` selects one report file, RF_FORMAT_ALL writes all three. */
RF_API rf_status rf_results_write(const rf_results* results, const char* dir, rf_format format);
RF_API size_t rf_results_trial_count(const rf_results* results);
RF_API size_t rf_results_exclusion_count(const rf_results* results);
RF_API const char* rf_results_trial_id(const rf_results* results, size_t index);
RF_API rf_status rf_results_path_errors(const rf_results* results, size_t index,
                                        double errors_mm[3]);
RF_API rf_status rf_results_best_model(const rf_results* results, size_t index,
                                       rf_model* model);
RF_API rf_status rf_results_conic_class(const rf_results* results, size_t index,
                                        rf_conic_class* cls);
RF_API rf_status rf_results_mean_errors(const rf_results* results, double mean_mm[3]);
RF_API void rf_results_free(rf_results* results);

/* Writes `n` synthetic trials drawn from the spec file into `out_dir` as
 * trials.csv plus truth.csv. */
RF_API rf_status rf_synth_generate(const char* spec_path, size_t n, const char* out_dir);

/* Algebraic conic fit of `n` points given as x0, y0, x1, y1, ...; writes the
 * unit-norm coefficients A..F in the input coordinates. */
RF_API rf_status rf_fit_conic(const double* xy, size_t n, double coeffs[6]);
/* Discriminant test on the unit-normalized coefficients as given, so they
 * should come from reasonably scaled coordinates. */
RF_API rf_status rf_classify_conic(const double coeffs[6], double tol, rf_conic_class* cls);
/* Rest-to-rest minimum jerk coefficients c0..c5 for one axis. */
RF_API rf_status rf_min_jerk_coefficients(double p0, double pf, double duration,
                                          double coeffs[6]);

#ifdef __cplusplus
}
#endif

#endif
