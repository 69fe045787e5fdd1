#ifndef RELIANCE_LENS_H
#define RELIANCE_LENS_H

/*
 * reliance-lens C API.
 *
 * Quantifies human reliance on AI recommendations in binary decision tasks:
 * reliance profiles, the attainable-accuracy envelope, reliance quality,
 * behavior simulation, dataset analysis, and SVG rendering of the framework.
 *
 * Conventions:
 *   - Every fallible function returns a status code (RLENS_OK on success)
 *     and writes results through out parameters.
 *   - On failure, rlens_last_error() returns a thread-local diagnostic
 *     message for the most recent failing call on this thread.
 *   - Strings returned through char** out parameters are heap-allocated;
 *     release them with rlens_string_free().
 *   - Opaque handles are released with their matching *_free function; all
 *     *_free functions accept NULL.
 *   - All fractional quantities are in [0, 1]; AI accuracy must be strictly
 *     above 0.5 and at most 1.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RLENS_API __declspec(dllexport)
#else
#define RLENS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* ---- status codes ---------------------------------------------------- */

#define RLENS_OK 0
#define RLENS_E_DOMAIN 1              /* input outside the framework's domain */
#define RLENS_E_EMPTY_CONDITION 2     /* all four reliance counts are zero */
#define RLENS_E_CONFIG 3              /* invalid simulation or palette config */
#define RLENS_E_PARSE 4               /* malformed dataset */
#define RLENS_E_DUPLICATE_TRIAL 5     /* repeated (condition, trial) key */
#define RLENS_E_LABEL 6               /* raw label outside the two-value alphabet */
#define RLENS_E_EMPTY_DATASET 7       /* dataset holds no records */
#define RLENS_E_ACCURACY_SCOPE 8      /* derived AI accuracy not above 1/2 */
#define RLENS_E_ACCURACY_MISMATCH 9   /* conditions disagree on AI accuracy */
#define RLENS_E_UNKNOWN_CONDITION 10  /* named condition not in the dataset */
#define RLENS_E_POINT_OUTSIDE 11      /* plot point outside the attainable region */
#define RLENS_E_INVALID_ARGUMENT 100  /* NULL pointer or malformed argument */
#define RLENS_E_INTERNAL 101          /* unexpected internal failure */

/* ---- library metadata ------------------------------------------------- */

/* Semantic version of the library, e.g. "0.1.0". */
RLENS_API const char* rlens_version(void);

/* Name of the pseudo-random generator contract, e.g. "mt19937_64/v1".
 * The generator algorithm is part of the file-format contract: identical
 * seeds reproduce identical datasets across releases and platforms. */
RLENS_API const char* rlens_rng_contract(void);

/* Stable name for a status code ("DomainError", ...); never NULL. */
RLENS_API const char* rlens_errc_name(int code);

/* Thread-local message for the most recent failing call; "" if none. */
RLENS_API const char* rlens_last_error(void);

/* Releases a string returned through a char** out parameter. NULL is ok. */
RLENS_API void rlens_string_free(char* s);

/* ---- scalar framework operations -------------------------------------- */

/* Shares of the four reliance cases; the four fields sum to 1. */
typedef struct rlens_profile {
    double a_correct; /* adhered, AI was correct  -> correct decision */
    double a_wrong;   /* adhered, AI was wrong    -> wrong decision */
    double o_correct; /* overrode, AI was wrong   -> correct decision */
    double o_wrong;   /* overrode, AI was correct -> wrong decision */
} rlens_profile;

/* Attainable final-accuracy interval at one adherence level. */
typedef struct rlens_envelope {
    double adherence;
    double lo;
    double hi;
    double width; /* hi - lo */
} rlens_envelope;

#define RLENS_TAG_UNDER_RELIANCE 0   /* adherence below the AI accuracy */
#define RLENS_TAG_OVER_RELIANCE 1    /* adherence above the AI accuracy */
#define RLENS_TAG_MATCHED_ADHERENCE 2 /* adherence equals the AI accuracy */

typedef struct rlens_class {
    int tag;                       /* one of the RLENS_TAG_* values */
    int complementarity_feasible;  /* 1 iff accuracy above the AI is attainable */
} rlens_class;

typedef struct rlens_effect {
    double delta_adherence;
    double delta_final_accuracy;
    double delta_quality;      /* valid only when delta_quality_defined is 1 */
    int delta_quality_defined; /* 0 when either side has undefined quality */
    rlens_class baseline_class;
    rlens_class treatment_class;
} rlens_effect;

/* Builds a profile from the four reliance-case counts (exact fractions). */
RLENS_API int rlens_profile_from_counts(uint64_t n_a_correct, uint64_t n_a_wrong,
                                        uint64_t n_o_correct, uint64_t n_o_wrong,
                                        rlens_profile* out);

/* Checks fields in [0,1] and unit sum, within tol (pass 0 for the default). */
RLENS_API int rlens_validate_profile(const rlens_profile* p, double tol);

/* Pure accessors; a NULL profile yields a quiet NaN. */
RLENS_API double rlens_adherence(const rlens_profile* p);
RLENS_API double rlens_ai_accuracy(const rlens_profile* p);
RLENS_API double rlens_final_accuracy(const rlens_profile* p);

/* Attainable final-accuracy range at the given adherence. */
RLENS_API int rlens_envelope_of(double acc, double adherence, rlens_envelope* out);

/* Width of that range: 2A, 2(1 - acc), or 2(1 - A) by branch. */
RLENS_API int rlens_envelope_width(double acc, double adherence, double* out);

/* Adherence interval at which final_accuracy is attainable. */
RLENS_API int rlens_invert_accuracy(double acc, double final_accuracy, double* lo, double* hi);

/* Expected accuracy of a non-discerning behavior: (1-acc) + (2 acc - 1) A. */
RLENS_API int rlens_expected_accuracy_nondiscerning(double acc, double adherence, double* out);

/* Profile of a non-discerning behavior at the given adherence. */
RLENS_API int rlens_nondiscerning_profile(double acc, double adherence, rlens_profile* out);

/* Reliance quality Q in [0,1]: the profile's position inside its envelope.
 * When the envelope has zero width, *defined is set to 0 and *out is
 * untouched; otherwise *defined is 1. Pass tol 0 for the default. */
RLENS_API int rlens_quality(const rlens_profile* p, double tol, double* out, int* defined);

/* Under/over/matched tag plus complementarity feasibility. */
RLENS_API int rlens_classify(const rlens_profile* p, double tol, rlens_class* out);

/* Profiles attaining the envelope's hi (best) and lo (worst). */
RLENS_API int rlens_extremal_profiles(double acc, double adherence, rlens_profile* best,
                                      rlens_profile* worst);

/* 1 iff the profile has no wrong adherences and no wrong overrides. */
RLENS_API int rlens_is_perfect_reliance(const rlens_profile* p, double tol, int* out);

/* Deltas (treatment minus baseline) plus both classifications. Fails with
 * RLENS_E_ACCURACY_MISMATCH when the two profiles disagree on AI accuracy. */
RLENS_API int rlens_compare_profiles(const rlens_profile* baseline,
                                     const rlens_profile* treatment, double tol,
                                     rlens_effect* out);

/* ---- behavior simulation ---------------------------------------------- */

typedef struct rlens_behavior_model {
    double p_adhere_given_correct;
    double p_adhere_given_wrong;
} rlens_behavior_model;

#define RLENS_COMPOSITION_BERNOULLI 0    /* AI correctness drawn per trial */
#define RLENS_COMPOSITION_FIXED_COUNTS 1 /* exactly n*acc correct, shuffled */

/* Expected reliance profile under a behavior model. */
RLENS_API int rlens_expected_profile(double acc, const rlens_behavior_model* model,
                                     rlens_profile* out);

/* Simulates n_trials and returns them as a derived-schema CSV dataset.
 * Deterministic: identical arguments produce identical bytes. */
RLENS_API int rlens_simulate_csv(double acc, const rlens_behavior_model* model,
                                 uint64_t n_trials, uint64_t seed, int composition,
                                 const char* condition_id, char** out_csv);

/* ---- enumeration oracle ------------------------------------------------ */

/* Exhaustive enumeration of attainable correct-decision counts for an
 * n-trial task with acc_numerator correct AI recommendations (n <= 20). */
typedef struct rlens_oracle rlens_oracle;

RLENS_API int rlens_oracle_run(int n, int acc_numerator, rlens_oracle** out);
RLENS_API void rlens_oracle_free(rlens_oracle* oracle);

/* Attainable correct-decision counts at adherence count k, ascending.
 * The returned array is owned by the oracle handle. */
RLENS_API int rlens_oracle_attainable(const rlens_oracle* oracle, int k, const int** counts,
                                      size_t* len);

/* ---- datasets ---------------------------------------------------------- */

#define RLENS_FORMAT_AUTO (-1)
#define RLENS_FORMAT_CSV 0
#define RLENS_FORMAT_JSON 1

#define RLENS_SCHEMA_AUTO (-1)
#define RLENS_SCHEMA_DERIVED 0
#define RLENS_SCHEMA_RAW 1

typedef struct rlens_dataset rlens_dataset;

/* Parses a dataset held in memory (bytes need not be NUL-terminated). */
RLENS_API int rlens_dataset_parse(const char* bytes, size_t len, int format, int schema,
                                  rlens_dataset** out);
RLENS_API void rlens_dataset_free(rlens_dataset* dataset);

RLENS_API int rlens_dataset_trial_count(const rlens_dataset* dataset, uint64_t* out);
RLENS_API int rlens_dataset_condition_count(const rlens_dataset* dataset, size_t* out);

/* Condition ids in lexicographic order; the string is owned by the handle. */
RLENS_API int rlens_dataset_condition_id(const rlens_dataset* dataset, size_t index,
                                         const char** out);

/* The four reliance-case counts for one condition, in profile field order. */
RLENS_API int rlens_dataset_counts(const rlens_dataset* dataset, const char* condition_id,
                                   uint64_t out_counts[4]);

/* Serializes the records back out in the derived schema. */
RLENS_API int rlens_dataset_write_csv(const rlens_dataset* dataset, char** out);
RLENS_API int rlens_dataset_write_json(const rlens_dataset* dataset, char** out);

/* ---- analysis ---------------------------------------------------------- */

#define RLENS_GROUP_BY_AUTO 0        /* participant summaries iff the column exists */
#define RLENS_GROUP_BY_PARTICIPANT 1 /* require participant summaries */
#define RLENS_GROUP_BY_NONE 2        /* pooled metrics only */

typedef struct rlens_analyze_options {
    double tolerance;             /* equality tolerance; 0 means the default 1e-9 */
    uint64_t bootstrap_resamples; /* 0 disables bootstrap intervals */
    uint64_t bootstrap_seed;
    int group_by;                 /* one of the RLENS_GROUP_BY_* values */
    double tag_threshold;         /* narrative-tag threshold; 0 means the default 0.05 */
} rlens_analyze_options;

/* Fills an options struct with the defaults described above. */
RLENS_API void rlens_analyze_options_init(rlens_analyze_options* options);

typedef struct rlens_analysis rlens_analysis;

/* Analyzes every condition of the dataset. Options may be NULL for defaults. */
RLENS_API int rlens_analyze(const rlens_dataset* dataset, const rlens_analyze_options* options,
                            rlens_analysis** out);
RLENS_API void rlens_analysis_free(rlens_analysis* analysis);

/* JSON array with one report per condition (fixed key order, fractions at
 * nine decimals, undefined quality as null). */
RLENS_API int rlens_analysis_reports_json(const rlens_analysis* analysis, char** out);

/* Human-readable table; the only view that prints percentages. */
RLENS_API int rlens_analysis_table(const rlens_analysis* analysis, char** out);

/* Diagnostic warnings accumulated during analysis, one per line; "" if none. */
RLENS_API int rlens_analysis_warnings(const rlens_analysis* analysis, char** out);

/* Baseline-vs-treatments comparison as JSON. */
RLENS_API int rlens_analysis_compare_json(const rlens_analysis* analysis,
                                          const char* baseline_id, char** out);

/* Framework SVG with one point per condition; arrows from the baseline to
 * every treatment when baseline_id is non-NULL. palette is a
 * "below=...,above=...,line=...,marker=..." override string or NULL. */
RLENS_API int rlens_analysis_plot_svg(const rlens_analysis* analysis, const char* baseline_id,
                                      const char* palette, double width, double height,
                                      char** out);

/* ---- plot geometry ----------------------------------------------------- */

/* Region polygons in (adherence, final accuracy) coordinates, interleaved
 * x0,y0,x1,y1,...: "below" has 4 vertices (8 doubles), "above" has 3
 * (6 doubles). *below_len and *above_len receive the vertex counts. */
RLENS_API int rlens_region_geometry(double acc, double below_xy[8], size_t* below_len,
                                    double above_xy[6], size_t* above_len);

/* Guide segments as x0,y0,x1,y1: the non-discernment expectation line and
 * the vertical matched-adherence segment. */
RLENS_API int rlens_guide_lines(double acc, double nondiscern_xy[4], double matched_xy[4]);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RELIANCE_LENS_H */
