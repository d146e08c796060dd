#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rng.hpp"
#include "textcodec.hpp"

namespace forecite {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

inline constexpr double kRmsEps = 1e-6;

struct ModelConfig {
  int vocab_size = kVocabSize;
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 4;
  int d_ff = 256;
  int max_seq_len = 512;
  uint64_t init_seed = 0;
};

long long param_count(const ModelConfig& config);

struct LoraConfig {
  int rank = 4;
  double alpha = 8.0;
  double dropout = 0.05;
};

// Stored input-major: effective weight delta = scale * a * b with
// a: d_in x rank (Gaussian init) and b: rank x d_out (zero init).
struct LoraAdapter {
  Mat a;
  Mat b;
};

struct LayerParams {
  Vec attn_norm;
  Vec ffn_norm;
  Mat wq, wk, wv, wo;  // d_model x d_model, y = x * W
  Mat w1;              // d_model x d_ff
  Mat w2;              // d_ff x d_model
  std::optional<LoraAdapter> lora_q, lora_v;
};

struct RegressionLM {
  ModelConfig config;
  Mat tok_emb;  // vocab x d_model
  Mat pos_emb;  // max_seq_len x d_model
  std::vector<LayerParams> layers;
  Vec final_norm;
  Vec head_w;
  double head_b = 0.0;
  std::optional<LoraConfig> lora;
};

// Scaled Gaussian init (std 0.02, residual projections wo/w2 additionally
// scaled by 1/sqrt(2*n_layers)), unit norms, zero head. Seed-determined.
RegressionLM init_model(const ModelConfig& config);

// Same shapes, all parameters zero; used as a gradient container.
RegressionLM zeros_like(const RegressionLM& model);

struct ParamRef {
  std::string name;
  double* data;
  long rows;
  long cols;
  bool decay;  // participates in weight decay
};

// Every parameter in declaration order; names are stable and double as
// checkpoint array names and optimizer moment keys.
std::vector<ParamRef> param_refs(RegressionLM& model);

struct FreezeMask {
  bool base = false;
  bool lora = false;
  bool head = true;

  bool trainable(const std::string& name) const;
};

struct LayerCache {
  Mat x_in, a_norm;
  Vec a_rms;
  Mat q, k, v;
  Mat q_drop_mask, v_drop_mask;  // inverted-dropout scale factors (empty = no dropout)
  Mat q_mid, v_mid;              // dropped input times lora a
  std::vector<Mat> probs;        // per-head attention rows
  Mat ctx, x_mid, f_norm;
  Vec f_rms;
  Mat u, g;
};

struct ForwardCache {
  std::vector<int> ids;
  int attn_len = 0;
  Mat emb;  // block-0 input (token embedding + positional)
  std::vector<LayerCache> layers;
  Mat h_pre;
  Vec h_rms;
  Mat h;  // final normed hidden, T x d_model
  bool from_embeddings = false;
};

struct ForwardOptions {
  bool training = false;   // enables adapter dropout
  Rng* dropout_rng = nullptr;
};

// Pre-norm causal blocks then final norm. Pads are excluded as keys/values;
// pad queries still produce (unused) rows.
Mat forward_hidden(const RegressionLM& model, const std::vector<int>& ids, int attn_len,
                   ForwardCache* cache = nullptr, const ForwardOptions& opts = {});

// head_w . h[last non-pad] + head_b.
double predict(const RegressionLM& model, const std::vector<int>& ids, int attn_len,
               ForwardCache* cache = nullptr, const ForwardOptions& opts = {});

// Render-free convenience: encode then predict (standardized space).
double predict_text(const RegressionLM& model, std::string_view text);

std::vector<double> predict_batch(const RegressionLM& model, const TokenBatch& batch);

// Same computation as predict but starting from caller-supplied token
// embedding rows (positional embeddings added inside).
double forward_from_embeddings(const RegressionLM& model, const Mat& emb, int attn_len,
                               ForwardCache* cache = nullptr);

// Tied-embedding logits: hidden times tok_emb transpose.
Mat lm_logits(const RegressionLM& model, const std::vector<int>& ids, int attn_len,
              ForwardCache* cache = nullptr);

struct BackwardOptions {
  bool base = true;  // block weights, norms, embeddings
  bool lora = true;
  bool head = true;
};

// d(loss)/d(prediction) in, parameter gradients accumulated into grads;
// demb (if given) receives d(loss)/d(input embedding rows).
void backward_predict(const RegressionLM& model, const ForwardCache& cache, double dscalar,
                      RegressionLM& grads, const BackwardOptions& opts, Mat* demb = nullptr);

// Upstream gradient on the logits matrix (T x vocab).
void backward_lm(const RegressionLM& model, const ForwardCache& cache, const Mat& dlogits,
                 RegressionLM& grads, const BackwardOptions& opts);

// Attach zero-initialized-B adapters to every layer's Q and V projections.
void apply_lora(RegressionLM& model, const LoraConfig& config, uint64_t seed);

// Fold adapter products into the base weights and detach the adapters.
void merge_lora(RegressionLM& model);

long long trainable_param_count(RegressionLM& model, const FreezeMask& mask);

}  // namespace forecite
