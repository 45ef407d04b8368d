/*
 * btsampler C API.
 *
 * Every object is an opaque handle created by a bts_*_create/load/...
 * function and released with the matching bts_*_free. Functions return a
 * bts_status; on failure, bts_last_error() describes the problem. Strings
 * returned through const char* out-parameters are owned by the handle they
 * came from and stay valid until that handle is freed.
 *
 * Handles are immutable after creation (except bts_params, which is a plain
 * struct) and may be shared between threads for reading.
 */
#ifndef BTSAMPLER_H
#define BTSAMPLER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef BTS_BUILDING_LIBRARY
#    define BTS_API __declspec(dllexport)
#  else
#    define BTS_API __declspec(dllimport)
#  endif
#else
#  define BTS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bts_status {
  BTS_OK = 0,
  BTS_ERR_USAGE = 1,     /* argument outside the operation's contract */
  BTS_ERR_DATA = 2,      /* malformed or inconsistent input data */
  BTS_ERR_IO = 3,        /* file could not be read or written */
  BTS_ERR_NOT_FOUND = 4, /* lookup key absent */
  BTS_ERR_INTERNAL = 5
} bts_status;

typedef enum bts_report_order {
  BTS_ORDER_MEAN_LOSS_DESC = 0,
  BTS_ORDER_FREQ_ASC = 1
} bts_report_order;

typedef enum bts_criterion {
  BTS_CRITERION_FREQ = 0,
  BTS_CRITERION_MEAN_LOSS = 1,
  BTS_CRITERION_MEAN_AND_STD = 2
} bts_criterion;

typedef enum bts_context_kind {
  BTS_CONTEXT_WINDOW = 0,
  BTS_CONTEXT_SUBWORD = 1,
  BTS_CONTEXT_SENTENCE = 2
} bts_context_kind;

typedef enum bts_similarity_kind {
  BTS_SIM_MATCH = 0,
  BTS_SIM_EMBEDDING = 1
} bts_similarity_kind;

typedef struct bts_corpus bts_corpus;
typedef struct bts_records bts_records;
typedef struct bts_lm bts_lm;
typedef struct bts_stats bts_stats;
typedef struct bts_difficulty bts_difficulty;
typedef struct bts_embeddings bts_embeddings;
typedef struct bts_sample_set bts_sample_set;

BTS_API const char* bts_version(void);
/* Name of the seeded generator scheme; recorded in run manifests. */
BTS_API const char* bts_generator_name(void);
/* Message for the last failed call on this thread ("" after success). */
BTS_API const char* bts_last_error(void);
/* Warning raised by the last call on this thread, or "". */
BTS_API const char* bts_last_warning(void);

/* ---- run parameters ---------------------------------------------------- */

#define BTS_MARKER_CAPACITY 32

typedef struct bts_params {
  double mu;          /* mean-loss threshold, default 5 */
  double rho;         /* loss std threshold, default 10 */
  uint64_t eta;       /* frequency threshold, default 5000 */
  double s;           /* similarity threshold, default 0.75 */
  uint64_t w;         /* window half-width, default 4 */
  uint64_t n;         /* sample size; 0 = bitext size */
  uint64_t seed;
  int has_theta;      /* 0: occurrence threshold follows mu */
  double theta;
  uint64_t lm_order;  /* n-gram oracle order, default 3 */
  double lm_k;        /* add-k constant, default 0.1 */
  char marker[BTS_MARKER_CAPACITY]; /* subword marker, default "@@" */
} bts_params;

BTS_API bts_status bts_params_init(bts_params* params);
/* Overlays "key = value" lines from a config file. */
BTS_API bts_status bts_params_load_file(bts_params* params, const char* path);
BTS_API bts_status bts_params_set(bts_params* params, const char* key,
                                  const char* value);
/* Writes "key = value\n" lines into buf (NUL-terminated when it fits) and
 * stores the required size, excluding the NUL, in *needed. */
BTS_API bts_status bts_params_dump(const bts_params* params, char* buf,
                                   size_t capacity, size_t* needed);
BTS_API double bts_params_theta(const bts_params* params);

/* ---- corpus ------------------------------------------------------------ */

BTS_API bts_status bts_corpus_load(const char* path, const char* marker,
                                   bts_corpus** out);
BTS_API bts_status bts_corpus_parse(const char* text, size_t length,
                                    const char* marker, bts_corpus** out);
BTS_API void bts_corpus_free(bts_corpus* corpus);
BTS_API size_t bts_corpus_size(const bts_corpus* corpus);
BTS_API size_t bts_corpus_token_count(const bts_corpus* corpus);
BTS_API bts_status bts_corpus_sentence_length(const bts_corpus* corpus,
                                              size_t id, size_t* length);
BTS_API bts_status bts_corpus_token(const bts_corpus* corpus, size_t id,
                                    size_t position, const char** token);
BTS_API bts_status bts_corpus_save(const bts_corpus* corpus, const char* path);
/* Word spans of sentence `id` as inclusive [first, last] pairs. Writes up
 * to `capacity` spans and stores the total in *count. */
BTS_API bts_status bts_corpus_word_spans(const bts_corpus* corpus, size_t id,
                                         size_t* firsts, size_t* lasts,
                                         size_t capacity, size_t* count);

/* ---- loss records ------------------------------------------------------ */

BTS_API bts_status bts_records_load(const char* path, bts_records** out);
BTS_API bts_status bts_records_save(const bts_records* records,
                                    const char* path);
BTS_API void bts_records_free(bts_records* records);
BTS_API size_t bts_records_count(const bts_records* records);
BTS_API bts_status bts_records_get(const bts_records* records, size_t index,
                                   size_t* sentence_id, size_t* position,
                                   const char** token, double* loss);
/* corpus may be NULL; otherwise ids, positions and tokens must agree. */
BTS_API bts_status bts_records_validate(const bts_records* records,
                                        const bts_corpus* corpus);
/* Records with loss > theta, in input order (difficult occurrences). */
BTS_API bts_status bts_records_difficult(const bts_records* records,
                                         double theta, bts_records** out);

/* ---- n-gram oracle ----------------------------------------------------- */

BTS_API bts_status bts_lm_train(const bts_corpus* corpus, uint64_t order,
                                double k, bts_lm** out);
BTS_API void bts_lm_free(bts_lm* lm);
BTS_API bts_status bts_lm_probability(const bts_lm* lm,
                                      const char* const* history,
                                      size_t history_length, const char* token,
                                      double* probability);
BTS_API bts_status bts_lm_score(const bts_lm* lm, const bts_corpus* corpus,
                                bts_records** out);

/* ---- statistics -------------------------------------------------------- */

BTS_API bts_status bts_stats_aggregate(const bts_records* records,
                                       bts_stats** out);
BTS_API bts_status bts_stats_load_report(const char* path, bts_stats** out);
BTS_API bts_status bts_stats_save_report(const bts_stats* stats,
                                         bts_report_order order,
                                         const char* path);
BTS_API void bts_stats_free(bts_stats* stats);
BTS_API size_t bts_stats_size(const bts_stats* stats);
BTS_API bts_status bts_stats_lookup(const bts_stats* stats, const char* token,
                                    uint64_t* freq, double* mean_loss,
                                    double* std_loss);
/* Writes the diff TSV. Any of the summary out-parameters may be NULL;
 * *spearman is the rank correlation between base mean loss and the change
 * (NaN when fewer than two tokens are shared). */
BTS_API bts_status bts_stats_diff_save(const bts_stats* base,
                                       const bts_stats* retrained,
                                       const char* path, size_t* shared,
                                       size_t* missing_in_retrained,
                                       size_t* missing_in_base,
                                       double* spearman);

/* ---- difficulty -------------------------------------------------------- */

BTS_API bts_status bts_difficulty_select(const bts_stats* stats,
                                         bts_criterion criterion,
                                         const bts_params* params,
                                         bts_difficulty** out);
BTS_API bts_status bts_difficulty_load(const char* path, bts_difficulty** out);
BTS_API bts_status bts_difficulty_save(const bts_difficulty* set,
                                       const char* path);
BTS_API void bts_difficulty_free(bts_difficulty* set);
BTS_API size_t bts_difficulty_size(const bts_difficulty* set);
BTS_API int bts_difficulty_contains(const bts_difficulty* set,
                                    const char* token);

/* ---- embeddings -------------------------------------------------------- */

BTS_API bts_status bts_embeddings_load(const char* path, bts_embeddings** out);
BTS_API void bts_embeddings_free(bts_embeddings* table);
BTS_API size_t bts_embeddings_size(const bts_embeddings* table);
BTS_API size_t bts_embeddings_dim(const bts_embeddings* table);

/* ---- sampling ---------------------------------------------------------- */

BTS_API bts_status bts_sample_random(const bts_corpus* mono, uint64_t n,
                                     uint64_t seed, bts_sample_set** out);
BTS_API bts_status bts_sample_diff(const bts_difficulty* difficult,
                                   const bts_corpus* mono, uint64_t n,
                                   uint64_t seed, bts_sample_set** out);
/* `occurrences` are difficult occurrences, e.g. from bts_records_difficult. */
BTS_API bts_status bts_sample_ratio(const bts_records* occurrences,
                                    const bts_corpus* mono, uint64_t n,
                                    uint64_t seed, bts_sample_set** out);
/* Subword contexts use the marker bitext_target was loaded with.
 * embeddings must be non-NULL for BTS_SIM_EMBEDDING. */
BTS_API bts_status bts_sample_context(
    const bts_records* occurrences, const bts_corpus* bitext_target,
    const bts_corpus* mono, bts_context_kind context, uint64_t w,
    bts_similarity_kind similarity, const bts_embeddings* embeddings,
    double s, uint64_t n, uint64_t seed, bts_sample_set** out);
BTS_API void bts_sample_set_free(bts_sample_set* set);
BTS_API size_t bts_sample_set_size(const bts_sample_set* set);
BTS_API bts_status bts_sample_set_id(const bts_sample_set* set, size_t index,
                                     size_t* sentence_id);
BTS_API int bts_sample_set_exhausted(const bts_sample_set* set);
BTS_API const char* bts_sample_set_warning(const bts_sample_set* set);
/* Sampled sentences (one per line, acceptance order) plus provenance TSV. */
BTS_API bts_status bts_sample_set_save(const bts_sample_set* set,
                                       const bts_corpus* mono,
                                       const char* sentences_path,
                                       const char* provenance_path);

/* ---- mixing ------------------------------------------------------------ */

typedef struct bts_mix_summary {
  uint64_t real_count;
  uint64_t synthetic_required;
  uint64_t synthetic_count;
  int short_supply;
} bts_mix_summary;

BTS_API bts_status bts_parse_ratio(const char* text, uint64_t* real_part,
                                   uint64_t* syn_part);
/* summary may be NULL. */
BTS_API bts_status bts_mix_files(const char* real_source,
                                 const char* real_target,
                                 const char* synthetic_source,
                                 const char* synthetic_target,
                                 uint64_t real_part, uint64_t syn_part,
                                 uint64_t seed, uint64_t epoch,
                                 const char* out_source,
                                 const char* out_target,
                                 bts_mix_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* BTSAMPLER_H */
