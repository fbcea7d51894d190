/*
 * ratl - rationale analytics and classification toolkit for development chat
 * logs. C API: opaque handles, integer status codes, UTF-8 strings.
 *
 * Conventions:
 *   - Every fallible function returns a ratl_status (RATL_OK == 0 on
 *     success). On failure, ratl_last_error() returns a message describing
 *     the most recent error on the calling thread.
 *   - Strings returned through char** out-parameters are owned by the caller
 *     and must be released with ratl_string_free().
 *   - Handles are released with their matching *_free() function; freeing
 *     NULL is a no-op.
 */
#ifndef RATL_H
#define RATL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RATL_API __declspec(dllexport)
#else
#define RATL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ratl_status {
    RATL_OK = 0,
    RATL_ERR_IO = 1,               /* file missing / unreadable / unwritable */
    RATL_ERR_DATA = 2,             /* malformed or contract-violating input */
    RATL_ERR_INVALID_ARGUMENT = 3, /* bad parameter from the caller */
    RATL_ERR_UNSUPPORTED = 4,      /* operation undefined for this object */
    RATL_ERR_INTERNAL = 5,
} ratl_status;

/* Opaque handles. */
typedef struct ratl_corpus ratl_corpus;
typedef struct ratl_model ratl_model;

/* Library version ("major.minor.patch"); storage owned by the library. */
RATL_API const char* ratl_version(void);

/* Message for the last error on this thread; never NULL. */
RATL_API const char* ratl_last_error(void);

RATL_API void ratl_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Corpus                                                              */
/* ------------------------------------------------------------------ */

/* format: "jsonl" or "csv". Messages are validated (required fields,
 * parseable UTC timestamps, unique ids) and ordered by (team, timestamp). */
RATL_API ratl_status ratl_corpus_load(const char* path, const char* format, ratl_corpus** out);

/* Keeps only human-origin messages. */
RATL_API ratl_status ratl_corpus_filter_bots(const ratl_corpus* in, ratl_corpus** out);

/* Joins annotation records {"message_id", "labels"} (JSONL) onto the corpus;
 * unreferenced messages get an empty label set. */
RATL_API ratl_status ratl_corpus_join_annotations(const ratl_corpus* in,
                                                  const char* annotations_path,
                                                  ratl_corpus** out);

/* Canonical JSONL (includes labels when the corpus is annotated). */
RATL_API ratl_status ratl_corpus_write_jsonl(const ratl_corpus* corpus, const char* path);

RATL_API size_t ratl_corpus_message_count(const ratl_corpus* corpus);
RATL_API size_t ratl_corpus_team_count(const ratl_corpus* corpus);
RATL_API size_t ratl_corpus_rationale_count(const ratl_corpus* corpus);
RATL_API void ratl_corpus_free(ratl_corpus* corpus);

/* ------------------------------------------------------------------ */
/* Analytics                                                           */
/* ------------------------------------------------------------------ */

/* granularity: "day" or "week". *json_out receives the frequency report. */
RATL_API ratl_status ratl_frequency_report(const ratl_corpus* corpus, const char* granularity,
                                           char** json_out);

/* links_path: JSONL of typed links between rationale elements. */
RATL_API ratl_status ratl_completeness_report(const ratl_corpus* corpus, const char* links_path,
                                              char** json_out);

/* Renders any report JSON produced by this library as an aligned text table. */
RATL_API ratl_status ratl_report_render_text(const char* report_json, char** text_out);

/* ------------------------------------------------------------------ */
/* Training, evaluation, prediction                                    */
/* ------------------------------------------------------------------ */

enum { RATL_TASK_BINARY = 0, RATL_TASK_FINE = 1 };
enum { RATL_CLASSIFIER_NBM = 0, RATL_CLASSIFIER_SVM = 1 };
enum { RATL_ML_BR = 0, RATL_ML_LP = 1 };
enum { RATL_BALANCE_NONE = 0, RATL_BALANCE_UNDER = 1, RATL_BALANCE_SMOTE_UNDER = 2 };
enum { RATL_CV_KFOLD = 0, RATL_CV_TEAM = 1 };

typedef struct ratl_train_options {
    int task;       /* RATL_TASK_* */
    int classifier; /* RATL_CLASSIFIER_* */
    int ml_method;  /* RATL_ML_*; fine task only */
    int balance;    /* RATL_BALANCE_*; binary task only */
    double nb_alpha;
    double svm_lambda;
    int svm_epochs;
    int smote_k;
    int smote_percent;
    int ngram_min;
    int ngram_max;
    int lowercase;        /* 0/1 */
    int stopword_removal; /* 0/1 */
    uint64_t seed;
} ratl_train_options;

/* Fills in the defaults (binary task, nbm, no balancing, 1..3-grams,
 * lowercasing on, stopwords kept, seed 0). */
RATL_API void ratl_train_options_init(ratl_train_options* options);

typedef struct ratl_cv_options {
    int scheme;   /* RATL_CV_* */
    int k;        /* folds for RATL_CV_KFOLD */
    int stratify; /* 0/1 */
} ratl_cv_options;

RATL_API void ratl_cv_options_init(ratl_cv_options* options);

/* Trains on the full annotated corpus (the fine task uses only rationale
 * messages). */
RATL_API ratl_status ratl_train(const ratl_corpus* corpus, const ratl_train_options* options,
                                ratl_model** out);

/* Cross-validated evaluation; *json_out receives the evaluation report. */
RATL_API ratl_status ratl_evaluate(const ratl_corpus* corpus, const ratl_train_options* options,
                                   const ratl_cv_options* cv, char** json_out);

RATL_API ratl_status ratl_model_save(const ratl_model* model, const char* path);
RATL_API ratl_status ratl_model_load(const char* path, ratl_model** out);
/* RATL_TASK_BINARY or RATL_TASK_FINE. */
RATL_API int ratl_model_task(const ratl_model* model);
RATL_API void ratl_model_free(ratl_model* model);

/* Single message. Binary models produce {"rationale": bool}; fine models
 * produce {"labels": [..]}. */
RATL_API ratl_status ratl_predict_text(const ratl_model* model, const char* text,
                                       char** json_out);

/* Whole corpus; *jsonl_out receives one JSON object per message, in corpus
 * order: {"message_id", "rationale"} or {"message_id", "labels"}. */
RATL_API ratl_status ratl_predict_corpus(const ratl_model* model, const ratl_corpus* corpus,
                                         char** jsonl_out);

/* Binary filter first, fine labels for the messages predicted as rationale;
 * the rest get empty labels: {"message_id", "rationale", "labels"}. */
RATL_API ratl_status ratl_predict_chain(const ratl_model* binary_model,
                                        const ratl_model* fine_model, const ratl_corpus* corpus,
                                        char** jsonl_out);

/* ------------------------------------------------------------------ */
/* Utilities                                                           */
/* ------------------------------------------------------------------ */

/* Stable content fingerprint of a file ("fnv1a64:<hex>"), for run manifests. */
RATL_API ratl_status ratl_file_digest(const char* path, char** hex_out);

#ifdef __cplusplus
}
#endif

#endif /* RATL_H */
