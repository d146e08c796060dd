#ifndef FORECITE_H
#define FORECITE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Citation-rate prediction pipeline: corpus handling, two-phase training of a
 * small causal transformer with a scalar regression head, metric evaluation,
 * scaling-law fitting, and gradient attribution. All functions return a
 * status code; outputs are written through pointer arguments. Strings
 * returned through char** are heap-allocated and must be released with
 * fc_string_free. On failure, fc_last_error() describes the problem for the
 * calling thread. */

typedef enum fc_status {
  FC_OK = 0,
  FC_ERR_INVALID_ARGUMENT = 1,
  FC_ERR_IO = 2,
  FC_ERR_PARSE = 3,
  FC_ERR_RUNTIME = 4
} fc_status;

const char* fc_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* fc_last_error(void);

void fc_string_free(char* s);

typedef struct fc_corpus fc_corpus;
typedef struct fc_model fc_model;

/* ---- corpus ---- */

/* Read a JSON Lines corpus file. */
fc_status fc_corpus_open(const char* jsonl_path, fc_corpus** out);

/* Planted-signal synthetic corpus. spec_json may be NULL or "{}" for the
 * defaults; recognized keys: region (title|abstract|body), kind
 * (count|order), slots, marker, base, slope, sigma_noise, p_lo, p_hi,
 * date_lo, date_hi, cutoff ("YYYY-MM"), delta. */
fc_status fc_corpus_synthesize(int n_docs, uint64_t seed, const char* spec_json, fc_corpus** out);

fc_status fc_corpus_save(const fc_corpus* corpus, const char* jsonl_path);

/* Drop documents failing the policy; policy_json may be NULL for defaults
 * (keys: min_chars, max_chars, require_abstract, require_body,
 * min_ascii_ratio). report_json (optional) receives the rejection list. */
fc_status fc_corpus_filter(fc_corpus* corpus, const char* policy_json, char** report_json);

/* Remove near-duplicate titles, first occurrence wins. */
fc_status fc_corpus_dedup(fc_corpus* corpus);

/* Empty the named field ("title" or "abstract") in every document. */
fc_status fc_corpus_ablate(fc_corpus* corpus, const char* field);

/* Partition by publication month: strictly-before-cutoff (plus undated) vs
 * the rest sorted by date. Both outputs are fresh corpora. */
fc_status fc_corpus_temporal_split(const fc_corpus* corpus, const char* cutoff_month,
                                   fc_corpus** train_out, fc_corpus** holdout_out);

fc_status fc_corpus_size(const fc_corpus* corpus, size_t* out);

/* Canonical Markdown rendering of one document. */
fc_status fc_corpus_doc_markdown(const fc_corpus* corpus, size_t index, char** out);

/* One document as a JSON object string. */
fc_status fc_corpus_doc_json(const fc_corpus* corpus, size_t index, char** out);

void fc_corpus_free(fc_corpus* corpus);

/* ---- training ---- */

/* Train on the corpus and write a checkpoint. run_config_json keys (all
 * optional unless noted): model {d_model, n_layers, n_heads, d_ff,
 * max_seq_len, init_seed}, split {ratio, seed}, target {delta, cutoff},
 * phase1 / phase2 / pretrain {learning_rate, weight_decay, grad_accum_steps,
 * batch_size, epochs, seed}, lora {rank, alpha, dropout}, mode: "two_phase"
 * (default) | "phase1_only" | "pretrain", init_checkpoint: path to start
 * from. report_json (optional) receives loss traces and, for the regression
 * modes, train/test metric reports. */
fc_status fc_train(const fc_corpus* corpus, const char* run_config_json,
                   const char* checkpoint_path, char** report_json);

/* ---- models ---- */

fc_status fc_model_open(const char* checkpoint_path, fc_model** out);
fc_status fc_model_save(const fc_model* model, const char* checkpoint_path);

/* Predict from already-rendered Markdown text. Either output pointer may be
 * NULL. log_rate is the destandardized value. */
fc_status fc_model_predict_markdown(const fc_model* model, const char* text,
                                    double* standardized, double* log_rate);

/* Metric report over a selection of the corpus. selection_json may be NULL
 * ("all"); keys: side ("all" | "train" | "test"), ratio, seed — the split is
 * recomputed deterministically from (ratio, seed). */
fc_status fc_model_evaluate(const fc_model* model, const fc_corpus* corpus,
                            const char* selection_json, char** metrics_json);

/* Expanding-window monthly Pearson over the corpus (all docs need dates);
 * returns CSV "month,cumulative_r". */
fc_status fc_model_temporal_holdout(const fc_model* model, const fc_corpus* corpus,
                                    char** csv_out);

/* Gradient-times-input attribution of one document. Writes an HTML heatmap
 * when html_path is non-NULL; summary_csv (optional) receives the per-region
 * mean absolute score table. */
fc_status fc_model_saliency(const fc_model* model, const fc_corpus* corpus, size_t index,
                            const char* html_path, char** summary_csv);

void fc_model_free(fc_model* model);

/* ---- scaling ---- */

/* Size-by-data grid. grid_config_json keys: configs (array of model configs),
 * fractions (array in (0,1]), phase1/phase2/lora as in fc_train, split
 * {ratio, seed}, subsample_seed, workers. initial_checkpoint (optional path)
 * starts every cell from that base model. Returns the grid as CSV
 * "params_b,data_pct,split,metric,value". */
fc_status fc_run_grid(const fc_corpus* corpus, const char* grid_config_json,
                      const char* initial_checkpoint, char** grid_csv);

/* Per-cell deltas between two grid CSV strings (a minus b). */
fc_status fc_grid_compare(const char* grid_csv_a, const char* grid_csv_b, char** report_json);

/* Least-squares tanh scaling-law fit over one metric/split of a grid CSV. */
fc_status fc_fit_scaling(const char* grid_csv, const char* metric, const char* split,
                         char** fit_json);

/* tanh(beta0 + beta1*log2(params_b) + beta2*log2(data_pct)). */
fc_status fc_predict_scaling(double beta0, double beta1, double beta2, double params_b,
                             double data_pct, double* out);

/* ---- misc ---- */

/* Git-blob-style SHA-1 of a byte buffer (hex string). */
fc_status fc_blob_hash(const char* content, size_t len, char** hex_out);

#ifdef __cplusplus
}
#endif

#endif /* FORECITE_H */
