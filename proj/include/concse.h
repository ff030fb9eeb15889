/*
 * concse - code-switched contrastive sentence embeddings.
 *
 * C API of the shared library. All functions return a concse_status; on
 * failure concse_last_error() describes the problem (thread-local). Handles
 * are opaque and must be released with their matching _free function.
 * Status values double as the CLI exit codes.
 */

#ifndef CONCSE_H
#define CONCSE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum concse_status {
    CONCSE_OK = 0,
    CONCSE_ERR_CONFIG = 2,   /* bad usage, config or input data */
    CONCSE_ERR_IO = 3,       /* file system / network failure */
    CONCSE_ERR_INTERNAL = 4, /* internal invariant violation */
} concse_status;

const char* concse_version(void);
/* Message of the most recent failure on this thread; never NULL. */
const char* concse_last_error(void);

/* ---- constituency trees ---- */

typedef struct concse_tree concse_tree;

/* Parses one Penn-Treebank-style bracketed tree, e.g.
 * "(S (NP (DT The) (NN movie)) (VP (VBD was)))". */
concse_status concse_tree_parse(const char* text, concse_tree** out_tree);
void concse_tree_free(concse_tree* tree);
int concse_tree_token_count(const concse_tree* tree);
/* Space-joined leaf tokens. Returns the required buffer size (including the
 * terminating NUL) and copies up to buffer_size bytes when buffer != NULL. */
concse_status concse_tree_fringe(const concse_tree* tree, char* buffer,
                                 size_t buffer_size, size_t* required_size);

/* Rejection reasons reported by concse_tree_select_spans. */
typedef enum concse_rejection {
    CONCSE_ACCEPTED = 0,
    CONCSE_REJECT_WHOLE_SENTENCE_NP = 1,
    CONCSE_REJECT_NO_ELIGIBLE_SPAN = 2,
    CONCSE_REJECT_PRONOUN_ONLY = 3,
    CONCSE_REJECT_MALFORMED_TREE = 4,
} concse_rejection;

/* Noun-phrase selection. max_spans < 0 means unlimited. On success fills
 * starts/ends (token index ranges, end exclusive) up to capacity and sets
 * *out_count to the number of selected spans; *out_rejection is
 * CONCSE_ACCEPTED, or the rejection reason with *out_count = 0. */
concse_status concse_tree_select_spans(const concse_tree* tree, int max_spans,
                                       int* starts, int* ends, int capacity,
                                       int* out_count, concse_rejection* out_rejection);

/* ---- translation backends ---- */

typedef struct concse_backend concse_backend;

/* Offline dictionary: TSV rows "source<TAB>target", '#' comments. */
concse_status concse_backend_open_dict(const char* table_path, concse_backend** out_backend);
/* Remote backend configured by a key = value file (endpoint, cache_path,
 * field names; see the project README). */
concse_status concse_backend_open_http(const char* config_path, concse_backend** out_backend);
/* Translates one phrase. Same buffer protocol as concse_tree_fringe.
 * A missing entry or remote failure returns CONCSE_ERR_CONFIG /
 * CONCSE_ERR_IO with the detail in concse_last_error(). */
concse_status concse_backend_translate(concse_backend* backend, const char* phrase,
                                       const char* source_lang, const char* target_lang,
                                       char* buffer, size_t buffer_size,
                                       size_t* required_size);
void concse_backend_free(concse_backend* backend);

/* ---- trained models ---- */

typedef struct concse_model concse_model;

concse_status concse_model_load(const char* checkpoint_path, concse_model** out_model);
int concse_model_dim(const concse_model* model);
/* Sentence representation; out_vector must hold concse_model_dim doubles. */
concse_status concse_model_encode(const concse_model* model, const char* text,
                                  double* out_vector);
void concse_model_free(concse_model* model);

/* ---- pipeline commands (file level; the CLI is a thin wrapper) ---- */

typedef struct concse_augment_opts {
    const char* trees_path;   /* JSONL: {"id"?, "trees": ["(S ...)", ...]} per record */
    const char* records_path; /* pair JSONL/TSV, or triplet JSONL when triplets != 0 */
    int triplets;
    const char* dict_path;       /* exactly one of dict_path / http_config_path */
    const char* http_config_path;
    const char* out_path;
    const char* report_path;   /* NULL: out_path + ".report.json" */
    const char* manifest_path; /* NULL: out_path + ".manifest.json" */
    int max_spans;             /* < 0 = unlimited */
    int keep_on_translation_error; /* 0 = reject record (default) */
    const char* source_lang;       /* NULL = "en" */
    const char* target_lang;       /* NULL = "ko" */
} concse_augment_opts;

typedef struct concse_augment_report {
    long total;
    long accepted;
    long translation_failures;
    long rejected_whole_sentence_np;
    long rejected_no_eligible_span;
    long rejected_pronoun_only;
    long rejected_malformed_tree;
    long input_row_errors;
} concse_augment_report;

concse_status concse_augment(const concse_augment_opts* opts,
                             concse_augment_report* out_report);

/* NLI rows (premise, hypothesis, label) -> (premise, entailment,
 * contradiction) triplet JSONL; neutral rows are dropped. */
concse_status concse_build_nli(const char* rows_path, const char* out_path,
                               long* out_rows, long* out_triplets);

/* Seeded shuffle + contiguous slices; 2 or 3 ratios summing to 1. Partition
 * sizes are written to out_sizes (capacity n_ratios). */
concse_status concse_split(const char* in_path, const double* ratios, int n_ratios,
                           uint64_t seed, const char* out_prefix, long* out_sizes);

typedef struct concse_train_opts {
    const char* data_path;   /* sixtuple JSONL */
    const char* vocab_path;  /* one token per line; ids 0/1 are UNK/PAD */
    const char* config_path; /* key = value run config */
    const char* params_out;
    const char* history_out;   /* NULL: params_out + ".history.jsonl" */
    const char* manifest_path; /* NULL: params_out + ".manifest.json" */
} concse_train_opts;

concse_status concse_train(const concse_train_opts* opts);

typedef struct concse_eval_opts {
    const char* params_path;
    const char* data_path; /* pair records with score targets */
    const char* scenario;  /* "EN2EN", "EN2CS" or "CS2CS"; NULL = EN2EN */
    const char* task;      /* label in the report; NULL = "sts" */
    uint64_t seed;         /* recorded in the report */
    const char* report_out;    /* NULL: print only */
    const char* manifest_path; /* NULL: report_out + ".manifest.json" */
} concse_eval_opts;

concse_status concse_eval(const concse_eval_opts* opts, double* out_metric,
                          long* out_n_pairs);

typedef struct concse_ablate_opts {
    const char* data_path;
    const char* eval_path;
    const char* vocab_path;
    const char* config_path;
    /* Semicolon-separated grid specs, e.g.
     * "variants=v1,v2,v3,v4,v5,v6;tau=0.05". Dimensions: variants, tau,
     * lambda (value "na" disables the triplet term), alpha. */
    const char* grid;
    const char* scenario; /* evaluation side; NULL = "EN2CS" */
    const char* out_path;
    const char* manifest_path;
    int threads; /* 0 = hardware concurrency */
} concse_ablate_opts;

concse_status concse_ablate(const concse_ablate_opts* opts, long* out_cells);

/* Two-sided t-test between two samples. Array variant and a file variant
 * reading one number per line ('#' comments allowed). paired != 0 runs the
 * paired test on elementwise differences. */
concse_status concse_ttest(const double* a, int n_a, const double* b, int n_b,
                           int paired, double* out_t, double* out_df, double* out_p);
concse_status concse_ttest_files(const char* a_path, const char* b_path, int paired,
                                 double* out_t, double* out_df, double* out_p);

typedef struct concse_synth_opts {
    uint64_t seed;
    int n_concepts;   /* <= 0: 200 */
    int n_tuples;     /* <= 0: 500 */
    int n_eval_pairs; /* <= 0: 100 */
    const char* out_dir;
} concse_synth_opts;

/* Writes vocab.txt, train.jsonl and sts.jsonl under out_dir. */
concse_status concse_synth(const concse_synth_opts* opts);

#ifdef __cplusplus
}
#endif

#endif /* CONCSE_H */
