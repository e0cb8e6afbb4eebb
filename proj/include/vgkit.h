/*
 * vgkit - vocalisation-graph toolkit
 *
 * C API for turning time-aligned dialogue turns into vocalisation-graph
 * features, estimating speech rate from audio, and training/evaluating a
 * Real AdaBoost dialogue classifier. All handles are opaque; every function
 * that can fail returns a vgk_status and leaves a message readable through
 * vgk_last_error(). Strings returned through char** out-parameters are owned
 * by the caller and must be released with vgk_string_free().
 */
#ifndef VGKIT_H
#define VGKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VGKIT_API __declspec(dllexport)
#else
#define VGKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define VGKIT_VERSION "0.1.0"

typedef enum vgk_status {
  VGK_OK = 0,
  VGK_ERR_IO = 1,
  VGK_ERR_PARSE = 2,
  VGK_ERR_VALIDATION = 3,
  VGK_ERR_FORMAT = 4,
  VGK_ERR_INSUFFICIENT_DATA = 5,
  VGK_ERR_TRAINING = 6,
  VGK_ERR_INVALID_ARGUMENT = 7,
  VGK_ERR_INTERNAL = 8
} vgk_status;

VGKIT_API const char* vgk_status_name(vgk_status status);

/* Message describing the most recent failure on this thread. */
VGKIT_API const char* vgk_last_error(void);

VGKIT_API const char* vgk_version(void);

VGKIT_API void vgk_string_free(char* s);

typedef struct vgk_corpus vgk_corpus;   /* labeled dialogues (+ per-turn rates when simulated) */
typedef struct vgk_dataset vgk_dataset; /* per-dialogue feature vectors */
typedef struct vgk_model vgk_model;     /* trained stump ensemble */

/* ------------------------------------------------------------------ corpus */

/* turns_jsonl: one turn object per line
 *   {"dialogue_id": str, "speaker": str, "role": "patient"|"other",
 *    "start_s": num, "end_s": num, "words": int?}
 * labels_csv (optional): `dialogue_id,label` rows with label in {ad, nonad}.
 */
VGKIT_API vgk_status vgk_corpus_parse(const char* turns_jsonl, const char* labels_csv_or_null,
                                      vgk_corpus** out);

/* Seeded two-class synthetic corpus. profiles_json_or_null overrides the
 * shipped class profiles: {"ad": {...}, "nonad": {...}}. */
VGKIT_API vgk_status vgk_corpus_simulate(const char* profiles_json_or_null, int n_ad, int n_nonad,
                                         double target_dialogue_s, uint64_t seed,
                                         vgk_corpus** out);

VGKIT_API size_t vgk_corpus_size(const vgk_corpus* corpus);
VGKIT_API vgk_status vgk_corpus_dialogue_id(const vgk_corpus* corpus, size_t index, char** out);
VGKIT_API vgk_status vgk_corpus_turns_jsonl(const vgk_corpus* corpus, char** out);
VGKIT_API vgk_status vgk_corpus_labels_csv(const vgk_corpus* corpus, char** out);

/* Per-utterance true rates of a simulated corpus, as
 * `dialogue_id,utterance_id,rate` CSV. Fails for parsed corpora. */
VGKIT_API vgk_status vgk_corpus_rates_csv(const vgk_corpus* corpus, char** out);

/* Turn-taking descriptive statistics CSV; requires labels. */
VGKIT_API vgk_status vgk_corpus_stats_csv(const vgk_corpus* corpus, char** out);

VGKIT_API void vgk_corpus_free(vgk_corpus* corpus);

/* -------------------------------------------------------------- extraction */

typedef struct vgk_extract_options {
  int vgs;             /* 0 = vgo (30 features), 1 = vgs (32 features) */
  double frame_dt_s;   /* <= 0 selects the 0.1 s default */
  double min_event_s;  /* <= 0 selects the 0.05 s default */
  int add_one_smoothing;
} vgk_extract_options;

VGKIT_API void vgk_extract_options_init(vgk_extract_options* opts);

/* rates_csv is required when opts->vgs is set: `dialogue_id,utterance_id,rate`
 * rows covering every dialogue. */
VGKIT_API vgk_status vgk_extract(const vgk_corpus* corpus, const vgk_extract_options* opts,
                                 const char* rates_csv_or_null, vgk_dataset** out);

/* Vocalisation graph of one dialogue: counts, probs, steady, frame_dt_s. */
VGKIT_API vgk_status vgk_graph_json(const vgk_corpus* corpus, size_t index,
                                    const vgk_extract_options* opts, char** out);

/* DOT text; edges below edge_threshold (default 0.01 when <= 0) are omitted. */
VGKIT_API vgk_status vgk_graph_dot(const vgk_corpus* corpus, size_t index,
                                   const vgk_extract_options* opts, double edge_threshold,
                                   char** out);

/* ---------------------------------------------------------------- datasets */

/* Feature CSV with header `dialogue_id,label,schema,f00..f31`. */
VGKIT_API vgk_status vgk_dataset_from_csv(const char* csv_text, vgk_dataset** out);
VGKIT_API vgk_status vgk_dataset_to_csv(const vgk_dataset* dataset, char** out);
VGKIT_API size_t vgk_dataset_size(const vgk_dataset* dataset);

/* *is_vgs_out = 1 for vgs rows, 0 for vgo; fails when rows mix schemas. */
VGKIT_API vgk_status vgk_dataset_schema(const vgk_dataset* dataset, int* is_vgs_out);
VGKIT_API void vgk_dataset_free(vgk_dataset* dataset);

/* ------------------------------------------------------------------ models */

VGKIT_API vgk_status vgk_train_adaboost(const vgk_dataset* dataset, int rounds, vgk_model** out);
VGKIT_API vgk_status vgk_model_to_json(const vgk_model* model, char** out);
VGKIT_API vgk_status vgk_model_from_json(const char* json_text, vgk_model** out);

/* score = sum of stump scores; label: +1 (ad) when score >= 0, else -1. */
VGKIT_API vgk_status vgk_model_predict(const vgk_model* model, const double* features,
                                       size_t n_features, double* score_out, int* label_out);
VGKIT_API void vgk_model_free(vgk_model* model);

/* -------------------------------------------------------------- evaluation */

typedef struct vgk_eval_options {
  int trainer;       /* 0 = real adaboost, 1 = logistic regression baseline */
  int k;             /* folds, default 10 */
  int boost_rounds;  /* default 10 */
  double logistic_l2;
  int roc_rounds;    /* cross-validation rounds pooled into the ROC, default 10 */
  uint64_t seed;
} vgk_eval_options;

VGKIT_API void vgk_eval_options_init(vgk_eval_options* opts);

/* Runs stratified k-fold CV (micro + macro metrics for both class
 * perspectives), LOOCV overall accuracy, and the simulation-smoothed ROC.
 * metrics_json_out receives the report; roc_csv_out the threshold,fpr,tpr
 * table with an auc footer. Either out pointer may be NULL. */
VGKIT_API vgk_status vgk_evaluate(const vgk_dataset* dataset, const vgk_eval_options* opts,
                                  char** metrics_json_out, char** roc_csv_out);

/* ------------------------------------------------------------- speech rate */

typedef struct vgk_rate_result {
  long n_nuclei;
  double speaking_time_s;
  double syllables_per_min;
  double duration_s; /* total wav duration */
  int no_speech;     /* nonzero when nothing rose above the silence threshold */
} vgk_rate_result;

/* Unsupervised syllable-nuclei speech-rate estimate for a PCM16 wav file. */
VGKIT_API vgk_status vgk_rate_analyze_wav(const char* wav_path, vgk_rate_result* out);

/* (60 * word_count / reference_wpm) / actual_duration_s; reference_wpm <= 0
 * selects the 160 WPM default. */
VGKIT_API vgk_status vgk_speech_rate_ratio(long word_count, double actual_duration_s,
                                           double reference_wpm, double* out);

/* Mean and population variance of a rate list. */
VGKIT_API vgk_status vgk_rate_summary(const double* rates, size_t n, double* mean_out,
                                      double* variance_out);

/* Pearson correlation with t statistic, degrees of freedom and two-sided p. */
VGKIT_API vgk_status vgk_pearson_test(const double* x, const double* y, size_t n, double* r_out,
                                      double* t_out, double* df_out, double* p_out);

#ifdef __cplusplus
}
#endif

#endif /* VGKIT_H */
