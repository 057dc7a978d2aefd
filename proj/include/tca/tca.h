#ifndef TCA_TCA_H
#define TCA_TCA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TCA_BUILDING_SHARED)
#    define TCA_API __declspec(dllexport)
#  else
#    define TCA_API __declspec(dllimport)
#  endif
#else
#  define TCA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tca_status {
  TCA_OK = 0,
  TCA_ERR_INVALID_ARGUMENT = 1,
  TCA_ERR_DIMENSION_MISMATCH = 2,
  TCA_ERR_SINGULAR_MATRIX = 3,
  TCA_ERR_NOT_POSITIVE_DEFINITE = 4,
  TCA_ERR_RANK_DEFICIENT = 5,
  TCA_ERR_ZERO_IMPACT = 6,
  TCA_ERR_INCONSISTENT_NORMALIZATION = 7,
  TCA_ERR_PARSE = 8,
  TCA_ERR_UNKNOWN_VARIABLE = 9,
  TCA_ERR_HORIZON_OUT_OF_RANGE = 10,
  TCA_ERR_TERM_EXPLOSION = 11,
  TCA_ERR_PATH_EXPLOSION = 12,
  TCA_ERR_MIXED_ENDPOINTS = 13,
  TCA_ERR_TARGET_TOO_LARGE = 14,
  TCA_ERR_UNSUPPORTED_CONDITION = 15,
  TCA_ERR_BOOTSTRAP_UNSTABLE = 16,
  TCA_ERR_DECOMPOSITION_VIOLATED = 17,
  TCA_ERR_IO = 18,
  TCA_ERR_INTERNAL = 99
} tca_status;

typedef enum tca_model_kind {
  TCA_MODEL_REDUCED_VAR = 0,
  TCA_MODEL_VARMA = 1
} tca_model_kind;

typedef enum tca_expansion {
  TCA_EXPANSION_INCLUSION_EXCLUSION = 0,
  TCA_EXPANSION_DISJOINT_DNF = 1
} tca_expansion;

typedef struct tca_data tca_data;
typedef struct tca_model tca_model;
typedef struct tca_analysis tca_analysis;
typedef struct tca_effects tca_effects;

/* Message of the last failed call on this thread ("" if none). */
TCA_API const char* tca_last_error(void);
TCA_API const char* tca_status_name(tca_status status);
TCA_API const char* tca_version(void);

/* Strings returned through char** are freed with tca_string_free. */
TCA_API void tca_string_free(char* s);

/* ---- data ---- */
TCA_API tca_status tca_data_read_csv(const char* path, tca_data** out);
TCA_API tca_status tca_data_from_values(size_t rows, size_t cols, const double* row_major,
                                        const char* const* names, tca_data** out);
TCA_API size_t tca_data_rows(const tca_data* data);
TCA_API size_t tca_data_cols(const tca_data* data);
TCA_API const char* tca_data_name(const tca_data* data, size_t col);
TCA_API void tca_data_free(tca_data* data);

/* ---- models ---- */
TCA_API tca_status tca_model_estimate(const tca_data* data, size_t lags, int include_intercept,
                                      tca_model** out);
TCA_API tca_status tca_model_load(const char* path, tca_model** out);
TCA_API tca_status tca_model_save(const tca_model* model, const char* path);
/* ar: ell K x K row-major matrices back to back; ma likewise with q matrices.
   names and shock_names may be NULL. */
TCA_API tca_status tca_model_from_varma(size_t k, const double* a0, size_t ell, const double* ar,
                                        size_t q, const double* ma, const char* const* names,
                                        const char* const* shock_names, tca_model** out);
TCA_API tca_model_kind tca_model_get_kind(const tca_model* model);
TCA_API size_t tca_model_k(const tca_model* model);
/* p for a reduced VAR, ell for a VARMA. */
TCA_API size_t tca_model_lags(const tca_model* model);
TCA_API size_t tca_model_nobs(const tca_model* model);
TCA_API const char* tca_model_var_name(const tca_model* model, size_t i);
TCA_API tca_status tca_model_log_det_sigma(const tca_model* model, double* out);
TCA_API void tca_model_free(tca_model* model);

/* ---- analysis: ordering, shock, normalisation, horizon ---- */
TCA_API tca_status tca_analysis_create(const tca_model* model, tca_analysis** out);
/* Comma-separated names; unlisted variables follow in model order. */
TCA_API tca_status tca_analysis_set_order(tca_analysis* a, const char* order);
TCA_API tca_status tca_analysis_set_shock(tca_analysis* a, const char* shock);
/* var may be NULL: then value is the shock size for a structural model. */
TCA_API tca_status tca_analysis_set_normalize(tca_analysis* a, const char* var, double value);
TCA_API tca_status tca_analysis_set_horizon(tca_analysis* a, size_t h);
TCA_API tca_status tca_analysis_set_allow_large(tca_analysis* a, int allow);
TCA_API tca_status tca_analysis_set_threads(tca_analysis* a, unsigned threads);
TCA_API tca_status tca_analysis_set_expansion(tca_analysis* a, tca_expansion method);
TCA_API tca_status tca_analysis_set_freeze_normalization(tca_analysis* a, int freeze);
TCA_API void tca_analysis_free(tca_analysis* a);

TCA_API tca_status tca_analysis_effects(const tca_analysis* a, const char* condition,
                                        tca_effects** out);

/* Residual bootstrap; the model must be a reduced VAR estimated on `data`.
   Writes n_conditions handles to out (caller frees each). */
TCA_API tca_status tca_analysis_bootstrap(const tca_analysis* a, const tca_data* data,
                                          const char* const* conditions, size_t n_conditions,
                                          size_t reps, uint64_t seed, double level,
                                          tca_effects** out);

/* Path listing. target: "name_t" or "x<m>", or NULL for every target.
   all_shocks: list every shock of a structural model instead of the selected one. */
TCA_API tca_status tca_analysis_paths(const tca_analysis* a, const char* target, int all_shocks,
                                      char** out_text);

/* ---- effect tables ---- */
TCA_API size_t tca_effects_k(const tca_effects* e);
TCA_API size_t tca_effects_horizon(const tca_effects* e);
TCA_API const char* tca_effects_label(const tca_effects* e, size_t position);
/* position: transmission-order index, t: horizon. NaN when out of range. */
TCA_API double tca_effects_total(const tca_effects* e, size_t position, size_t t);
TCA_API double tca_effects_channel(const tca_effects* e, size_t position, size_t t);
TCA_API double tca_effects_complement(const tca_effects* e, size_t position, size_t t);
TCA_API int tca_effects_has_bands(const tca_effects* e);
TCA_API double tca_effects_lower(const tca_effects* e, size_t position, size_t t);
TCA_API double tca_effects_upper(const tca_effects* e, size_t position, size_t t);
TCA_API size_t tca_effects_discarded_draws(const tca_effects* e);
TCA_API double tca_effects_max_gap(const tca_effects* e);
TCA_API tca_status tca_effects_write_csv(const tca_effects* e, const char* path);
TCA_API tca_status tca_effects_to_csv(const tca_effects* e, char** out_text);
/* max |sum of channels - total| / max(1, |total|) over cells. */
TCA_API tca_status tca_effects_partition_gap(const tca_effects* const* list, size_t n,
                                             double* out_gap);
TCA_API void tca_effects_free(tca_effects* e);

/* ---- verification of an effects CSV ---- */
TCA_API tca_status tca_verify_csv(const char* path, double tol, size_t* rows, size_t* failures,
                                  double* worst);

#ifdef __cplusplus
}
#endif

#endif /* TCA_TCA_H */
