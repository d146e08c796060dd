#include "model.hpp"

#include <cmath>

#include "common.hpp"

namespace forecite {

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluK = 0.044715;

void validate_config(const ModelConfig& c) {
  if (c.vocab_size < 1 || c.d_model < 1 || c.n_layers < 1 || c.n_heads < 1 || c.d_ff < 1 ||
      c.max_seq_len < 1) {
    fail_invalid("model config dimensions must be >= 1");
  }
  if (c.d_model % c.n_heads != 0) fail_invalid("d_model must be divisible by n_heads");
}

void fill_normal(Mat& m, Rng& rng, double std) {
  double* p = m.data();
  for (long i = 0; i < m.size(); ++i) p[i] = rng.normal() * std;
}

double gelu(double u) {
  return 0.5 * u * (1.0 + std::tanh(kGeluC * (u + kGeluK * u * u * u)));
}

double gelu_grad(double u) {
  double t = std::tanh(kGeluC * (u + kGeluK * u * u * u));
  return 0.5 * (1.0 + t) + 0.5 * u * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluK * u * u);
}

void rmsnorm(const Mat& x, const Vec& g, Mat& out, Vec* rms) {
  long T = x.rows(), d = x.cols();
  out.resize(T, d);
  if (rms) rms->resize(T);
  for (long i = 0; i < T; ++i) {
    double r = std::sqrt(x.row(i).squaredNorm() / d + kRmsEps);
    out.row(i) = x.row(i).cwiseProduct(g.transpose()) / r;
    if (rms) (*rms)(i) = r;
  }
}

// dout is the upstream gradient on rmsnorm(x, g); returns d/dx, accumulates d/dg.
Mat rmsnorm_backward(const Mat& x, const Vec& g, const Vec& rms, const Mat& dout, Vec* dg) {
  long T = x.rows(), d = x.cols();
  Mat dx(T, d);
  for (long i = 0; i < T; ++i) {
    double r = rms(i);
    Eigen::RowVectorXd w = dout.row(i).cwiseProduct(g.transpose());
    double s = w.dot(x.row(i));
    dx.row(i) = w / r - x.row(i) * (s / (d * r * r * r));
    if (dg) dg->noalias() += (dout.row(i).cwiseProduct(x.row(i)) / r).transpose();
  }
  return dx;
}

Mat dropout_mask(long rows, long cols, double p, Rng& rng) {
  Mat mask(rows, cols);
  double keep_scale = 1.0 / (1.0 - p);
  double* data = mask.data();
  for (long i = 0; i < mask.size(); ++i) {
    data[i] = rng.next_double() < p ? 0.0 : keep_scale;
  }
  return mask;
}

struct BlockScratch {
  Mat a_norm, q, k, v, ctx, x_mid, f_norm, u, g;
  Vec a_rms, f_rms;
  Mat q_drop_mask, v_drop_mask, q_mid, v_mid;
  std::vector<Mat> probs;
};

void run_block(const RegressionLM& model, const LayerParams& layer, const Mat& x_in, int attn_len,
               const ForwardOptions& opts, BlockScratch& s, bool keep_probs, Mat& x_out) {
  long T = x_in.rows();
  int d = model.config.d_model;
  int heads = model.config.n_heads;
  int hd = d / heads;
  double lora_scale = model.lora ? model.lora->alpha / model.lora->rank : 0.0;
  bool drop = model.lora && opts.training && opts.dropout_rng && model.lora->dropout > 0.0;

  rmsnorm(x_in, layer.attn_norm, s.a_norm, &s.a_rms);

  s.q.noalias() = s.a_norm * layer.wq;
  if (layer.lora_q) {
    if (drop) {
      s.q_drop_mask = dropout_mask(T, d, model.lora->dropout, *opts.dropout_rng);
      s.q_mid.noalias() = s.a_norm.cwiseProduct(s.q_drop_mask) * layer.lora_q->a;
    } else {
      s.q_drop_mask.resize(0, 0);
      s.q_mid.noalias() = s.a_norm * layer.lora_q->a;
    }
    s.q.noalias() += lora_scale * (s.q_mid * layer.lora_q->b);
  }
  s.k.noalias() = s.a_norm * layer.wk;
  s.v.noalias() = s.a_norm * layer.wv;
  if (layer.lora_v) {
    if (drop) {
      s.v_drop_mask = dropout_mask(T, d, model.lora->dropout, *opts.dropout_rng);
      s.v_mid.noalias() = s.a_norm.cwiseProduct(s.v_drop_mask) * layer.lora_v->a;
    } else {
      s.v_drop_mask.resize(0, 0);
      s.v_mid.noalias() = s.a_norm * layer.lora_v->a;
    }
    s.v.noalias() += lora_scale * (s.v_mid * layer.lora_v->b);
  }

  s.ctx.resize(T, d);
  if (keep_probs) s.probs.assign(heads, Mat());
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
  for (int h = 0; h < heads; ++h) {
    auto qh = s.q.middleCols(h * hd, hd);
    auto kh = s.k.middleCols(h * hd, hd);
    auto vh = s.v.middleCols(h * hd, hd);
    Mat scores(T, T);
    scores.noalias() = qh * kh.transpose() * inv_sqrt;
    Mat probs = Mat::Zero(T, T);
    for (long i = 0; i < T; ++i) {
      long jmax = std::min<long>(i, attn_len - 1);
      double mx = scores.row(i).head(jmax + 1).maxCoeff();
      double denom = 0.0;
      for (long j = 0; j <= jmax; ++j) {
        double e = std::exp(scores(i, j) - mx);
        probs(i, j) = e;
        denom += e;
      }
      probs.row(i).head(jmax + 1) /= denom;
    }
    s.ctx.middleCols(h * hd, hd).noalias() = probs * vh;
    if (keep_probs) s.probs[h] = std::move(probs);
  }

  s.x_mid = x_in;
  s.x_mid.noalias() += s.ctx * layer.wo;

  rmsnorm(s.x_mid, layer.ffn_norm, s.f_norm, &s.f_rms);
  s.u.noalias() = s.f_norm * layer.w1;
  s.g = s.u.unaryExpr([](double u) { return gelu(u); });
  x_out = s.x_mid;
  x_out.noalias() += s.g * layer.w2;
}

Mat forward_core(const RegressionLM& model, Mat x, int attn_len, ForwardCache* cache,
                 const ForwardOptions& opts) {
  if (cache) {
    cache->emb = x;
    cache->layers.resize(model.layers.size());
  }
  for (size_t l = 0; l < model.layers.size(); ++l) {
    BlockScratch scratch;
    Mat x_out;
    run_block(model, model.layers[l], x, attn_len, opts, scratch, cache != nullptr, x_out);
    if (cache) {
      LayerCache& lc = cache->layers[l];
      lc.x_in = std::move(x);
      lc.a_norm = std::move(scratch.a_norm);
      lc.a_rms = std::move(scratch.a_rms);
      lc.q = std::move(scratch.q);
      lc.k = std::move(scratch.k);
      lc.v = std::move(scratch.v);
      lc.q_drop_mask = std::move(scratch.q_drop_mask);
      lc.v_drop_mask = std::move(scratch.v_drop_mask);
      lc.q_mid = std::move(scratch.q_mid);
      lc.v_mid = std::move(scratch.v_mid);
      lc.probs = std::move(scratch.probs);
      lc.ctx = std::move(scratch.ctx);
      lc.x_mid = std::move(scratch.x_mid);
      lc.f_norm = std::move(scratch.f_norm);
      lc.f_rms = std::move(scratch.f_rms);
      lc.u = std::move(scratch.u);
      lc.g = std::move(scratch.g);
    }
    x = std::move(x_out);
  }
  Mat h;
  Vec h_rms;
  rmsnorm(x, model.final_norm, h, &h_rms);
  if (cache) {
    cache->h_pre = std::move(x);
    cache->h_rms = std::move(h_rms);
    cache->h = h;
  }
  return h;
}

void validate_sequence(const RegressionLM& model, const std::vector<int>& ids, int attn_len) {
  if (ids.empty()) fail_invalid("empty token sequence");
  if (static_cast<int>(ids.size()) > model.config.max_seq_len) {
    fail_invalid("sequence length " + std::to_string(ids.size()) + " exceeds max_seq_len " +
                 std::to_string(model.config.max_seq_len));
  }
  if (attn_len < 1 || attn_len > static_cast<int>(ids.size())) {
    fail_invalid("attention length must lie in [1, sequence length]");
  }
  for (int id : ids) {
    if (id < 0 || id >= model.config.vocab_size) {
      fail_invalid("token id out of range: " + std::to_string(id));
    }
  }
}

Mat embed(const RegressionLM& model, const std::vector<int>& ids) {
  Mat x(static_cast<long>(ids.size()), model.config.d_model);
  for (size_t i = 0; i < ids.size(); ++i) {
    x.row(i) = model.tok_emb.row(ids[i]) + model.pos_emb.row(static_cast<long>(i));
  }
  return x;
}

}  // namespace

long long param_count(const ModelConfig& c) {
  long long d = c.d_model, dff = c.d_ff;
  long long per_layer = 2 * d + 4 * d * d + 2 * d * dff;
  return static_cast<long long>(c.vocab_size) * d + static_cast<long long>(c.max_seq_len) * d +
         c.n_layers * per_layer + d + d + 1;
}

RegressionLM init_model(const ModelConfig& config) {
  validate_config(config);
  RegressionLM m;
  m.config = config;
  Rng rng(config.init_seed);
  double std = 0.02;
  double resid_std = std / std::sqrt(2.0 * config.n_layers);

  m.tok_emb.resize(config.vocab_size, config.d_model);
  fill_normal(m.tok_emb, rng, std);
  m.pos_emb.resize(config.max_seq_len, config.d_model);
  fill_normal(m.pos_emb, rng, std);
  m.layers.resize(config.n_layers);
  for (LayerParams& layer : m.layers) {
    layer.attn_norm = Vec::Ones(config.d_model);
    layer.wq.resize(config.d_model, config.d_model);
    fill_normal(layer.wq, rng, std);
    layer.wk.resize(config.d_model, config.d_model);
    fill_normal(layer.wk, rng, std);
    layer.wv.resize(config.d_model, config.d_model);
    fill_normal(layer.wv, rng, std);
    layer.wo.resize(config.d_model, config.d_model);
    fill_normal(layer.wo, rng, resid_std);
    layer.ffn_norm = Vec::Ones(config.d_model);
    layer.w1.resize(config.d_model, config.d_ff);
    fill_normal(layer.w1, rng, std);
    layer.w2.resize(config.d_ff, config.d_model);
    fill_normal(layer.w2, rng, resid_std);
  }
  m.final_norm = Vec::Ones(config.d_model);
  m.head_w = Vec::Zero(config.d_model);
  m.head_b = 0.0;
  return m;
}

RegressionLM zeros_like(const RegressionLM& model) {
  RegressionLM z;
  z.config = model.config;
  z.lora = model.lora;
  z.tok_emb = Mat::Zero(model.tok_emb.rows(), model.tok_emb.cols());
  z.pos_emb = Mat::Zero(model.pos_emb.rows(), model.pos_emb.cols());
  z.layers.resize(model.layers.size());
  for (size_t l = 0; l < model.layers.size(); ++l) {
    const LayerParams& src = model.layers[l];
    LayerParams& dst = z.layers[l];
    dst.attn_norm = Vec::Zero(src.attn_norm.size());
    dst.ffn_norm = Vec::Zero(src.ffn_norm.size());
    dst.wq = Mat::Zero(src.wq.rows(), src.wq.cols());
    dst.wk = Mat::Zero(src.wk.rows(), src.wk.cols());
    dst.wv = Mat::Zero(src.wv.rows(), src.wv.cols());
    dst.wo = Mat::Zero(src.wo.rows(), src.wo.cols());
    dst.w1 = Mat::Zero(src.w1.rows(), src.w1.cols());
    dst.w2 = Mat::Zero(src.w2.rows(), src.w2.cols());
    if (src.lora_q) {
      dst.lora_q = LoraAdapter{Mat::Zero(src.lora_q->a.rows(), src.lora_q->a.cols()),
                               Mat::Zero(src.lora_q->b.rows(), src.lora_q->b.cols())};
    }
    if (src.lora_v) {
      dst.lora_v = LoraAdapter{Mat::Zero(src.lora_v->a.rows(), src.lora_v->a.cols()),
                               Mat::Zero(src.lora_v->b.rows(), src.lora_v->b.cols())};
    }
  }
  z.final_norm = Vec::Zero(model.final_norm.size());
  z.head_w = Vec::Zero(model.head_w.size());
  z.head_b = 0.0;
  return z;
}

std::vector<ParamRef> param_refs(RegressionLM& m) {
  std::vector<ParamRef> refs;
  auto add_mat = [&](const std::string& name, Mat& mat, bool decay) {
    refs.push_back({name, mat.data(), mat.rows(), mat.cols(), decay});
  };
  auto add_vec = [&](const std::string& name, Vec& v, bool decay) {
    refs.push_back({name, v.data(), v.size(), 1, decay});
  };
  add_mat("tok_emb", m.tok_emb, false);
  add_mat("pos_emb", m.pos_emb, false);
  for (size_t l = 0; l < m.layers.size(); ++l) {
    std::string p = "layers." + std::to_string(l) + ".";
    LayerParams& layer = m.layers[l];
    add_vec(p + "attn_norm", layer.attn_norm, false);
    add_mat(p + "wq", layer.wq, true);
    if (layer.lora_q) {
      add_mat(p + "wq.lora_a", layer.lora_q->a, true);
      add_mat(p + "wq.lora_b", layer.lora_q->b, true);
    }
    add_mat(p + "wk", layer.wk, true);
    add_mat(p + "wv", layer.wv, true);
    if (layer.lora_v) {
      add_mat(p + "wv.lora_a", layer.lora_v->a, true);
      add_mat(p + "wv.lora_b", layer.lora_v->b, true);
    }
    add_mat(p + "wo", layer.wo, true);
    add_vec(p + "ffn_norm", layer.ffn_norm, false);
    add_mat(p + "w1", layer.w1, true);
    add_mat(p + "w2", layer.w2, true);
  }
  add_vec("final_norm", m.final_norm, false);
  add_vec("head_w", m.head_w, true);
  refs.push_back({"head_b", &m.head_b, 1, 1, false});
  return refs;
}

bool FreezeMask::trainable(const std::string& name) const {
  if (name == "head_w" || name == "head_b") return head;
  if (name.find(".lora_") != std::string::npos) return lora;
  return base;
}

long long trainable_param_count(RegressionLM& model, const FreezeMask& mask) {
  long long n = 0;
  for (const ParamRef& ref : param_refs(model)) {
    if (mask.trainable(ref.name)) n += ref.rows * ref.cols;
  }
  return n;
}

Mat forward_hidden(const RegressionLM& model, const std::vector<int>& ids, int attn_len,
                   ForwardCache* cache, const ForwardOptions& opts) {
  validate_sequence(model, ids, attn_len);
  if (cache) {
    *cache = ForwardCache{};
    cache->ids = ids;
    cache->attn_len = attn_len;
  }
  return forward_core(model, embed(model, ids), attn_len, cache, opts);
}

double predict(const RegressionLM& model, const std::vector<int>& ids, int attn_len,
               ForwardCache* cache, const ForwardOptions& opts) {
  if (attn_len < 1) fail_invalid("predict requires at least one non-pad token");
  Mat h = forward_hidden(model, ids, attn_len, cache, opts);
  return model.head_w.dot(h.row(attn_len - 1)) + model.head_b;
}

double predict_text(const RegressionLM& model, std::string_view text) {
  TokenSequence seq = encode(text, model.config.max_seq_len);
  return predict(model, seq.ids, seq.attention_len);
}

std::vector<double> predict_batch(const RegressionLM& model, const TokenBatch& batch) {
  std::vector<double> out;
  out.reserve(batch.ids.size());
  for (size_t i = 0; i < batch.ids.size(); ++i) {
    int attn_len = 0;
    for (int m : batch.mask[i]) attn_len += m;
    out.push_back(predict(model, batch.ids[i], attn_len));
  }
  return out;
}

double forward_from_embeddings(const RegressionLM& model, const Mat& emb, int attn_len,
                               ForwardCache* cache) {
  if (emb.rows() < 1 || emb.cols() != model.config.d_model) {
    fail_invalid("embedding matrix must be T x d_model with T >= 1");
  }
  if (emb.rows() > model.pos_emb.rows()) fail_invalid("embedding matrix exceeds max_seq_len");
  if (attn_len < 1 || attn_len > emb.rows()) {
    fail_invalid("attention length must lie in [1, sequence length]");
  }
  if (cache) {
    *cache = ForwardCache{};
    cache->attn_len = attn_len;
    cache->from_embeddings = true;
  }
  Mat x = emb + model.pos_emb.topRows(emb.rows());
  Mat h = forward_core(model, std::move(x), attn_len, cache, {});
  return model.head_w.dot(h.row(attn_len - 1)) + model.head_b;
}

Mat lm_logits(const RegressionLM& model, const std::vector<int>& ids, int attn_len,
              ForwardCache* cache) {
  Mat h = forward_hidden(model, ids, attn_len, cache);
  return h * model.tok_emb.transpose();
}

namespace {

// Shared trunk: upstream gradient dh on the final normed hidden states.
void backward_hidden(const RegressionLM& model, const ForwardCache& cache, const Mat& dh,
                     RegressionLM& grads, const BackwardOptions& opts, Mat* demb) {
  int d = model.config.d_model;
  int heads = model.config.n_heads;
  int hd = d / heads;
  long T = cache.h.rows();
  double lora_scale = model.lora ? model.lora->alpha / model.lora->rank : 0.0;

  Mat dx = rmsnorm_backward(cache.h_pre, model.final_norm, cache.h_rms, dh,
                            opts.base ? &grads.final_norm : nullptr);

  for (long l = static_cast<long>(model.layers.size()) - 1; l >= 0; --l) {
    const LayerParams& layer = model.layers[l];
    const LayerCache& lc = cache.layers[l];
    LayerParams& glayer = grads.layers[l];

    // FFN: x_out = x_mid + gelu(f_norm * w1) * w2
    Mat dx_mid = dx;
    if (opts.base) glayer.w2.noalias() += lc.g.transpose() * dx;
    Mat dg_act = dx * layer.w2.transpose();
    Mat du = dg_act.cwiseProduct(lc.u.unaryExpr([](double u) { return gelu_grad(u); }));
    if (opts.base) glayer.w1.noalias() += lc.f_norm.transpose() * du;
    Mat df = du * layer.w1.transpose();
    dx_mid.noalias() +=
        rmsnorm_backward(lc.x_mid, layer.ffn_norm, lc.f_rms, df, opts.base ? &glayer.ffn_norm : nullptr);

    // Attention: x_mid = x_in + ctx * wo
    Mat dctx = dx_mid * layer.wo.transpose();
    if (opts.base) glayer.wo.noalias() += lc.ctx.transpose() * dx_mid;

    Mat dq = Mat::Zero(T, d), dk = Mat::Zero(T, d), dv = Mat::Zero(T, d);
    double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
    for (int h = 0; h < heads; ++h) {
      auto qh = lc.q.middleCols(h * hd, hd);
      auto kh = lc.k.middleCols(h * hd, hd);
      auto vh = lc.v.middleCols(h * hd, hd);
      const Mat& probs = lc.probs[h];
      auto dch = dctx.middleCols(h * hd, hd);

      Mat dprobs = dch * vh.transpose();
      dv.middleCols(h * hd, hd).noalias() += probs.transpose() * dch;
      Mat dscores(T, T);
      for (long i = 0; i < T; ++i) {
        double dot = dprobs.row(i).dot(probs.row(i));
        dscores.row(i) = probs.row(i).cwiseProduct((dprobs.row(i).array() - dot).matrix());
      }
      dq.middleCols(h * hd, hd).noalias() += dscores * kh * inv_sqrt;
      dk.middleCols(h * hd, hd).noalias() += dscores.transpose() * qh * inv_sqrt;
    }

    Mat da = dq * layer.wq.transpose();
    da.noalias() += dk * layer.wk.transpose();
    da.noalias() += dv * layer.wv.transpose();

    if (layer.lora_q) {
      Mat dmid = lora_scale * (dq * layer.lora_q->b.transpose());
      if (opts.lora) {
        glayer.lora_q->b.noalias() += lora_scale * (lc.q_mid.transpose() * dq);
        if (lc.q_drop_mask.size()) {
          glayer.lora_q->a.noalias() += lc.a_norm.cwiseProduct(lc.q_drop_mask).transpose() * dmid;
        } else {
          glayer.lora_q->a.noalias() += lc.a_norm.transpose() * dmid;
        }
      }
      Mat da_lora = dmid * layer.lora_q->a.transpose();
      if (lc.q_drop_mask.size()) da_lora = da_lora.cwiseProduct(lc.q_drop_mask);
      da.noalias() += da_lora;
    }
    if (layer.lora_v) {
      Mat dmid = lora_scale * (dv * layer.lora_v->b.transpose());
      if (opts.lora) {
        glayer.lora_v->b.noalias() += lora_scale * (lc.v_mid.transpose() * dv);
        if (lc.v_drop_mask.size()) {
          glayer.lora_v->a.noalias() += lc.a_norm.cwiseProduct(lc.v_drop_mask).transpose() * dmid;
        } else {
          glayer.lora_v->a.noalias() += lc.a_norm.transpose() * dmid;
        }
      }
      Mat da_lora = dmid * layer.lora_v->a.transpose();
      if (lc.v_drop_mask.size()) da_lora = da_lora.cwiseProduct(lc.v_drop_mask);
      da.noalias() += da_lora;
    }

    if (opts.base) {
      glayer.wq.noalias() += lc.a_norm.transpose() * dq;
      glayer.wk.noalias() += lc.a_norm.transpose() * dk;
      glayer.wv.noalias() += lc.a_norm.transpose() * dv;
    }

    dx = dx_mid;
    dx.noalias() +=
        rmsnorm_backward(lc.x_in, layer.attn_norm, lc.a_rms, da, opts.base ? &glayer.attn_norm : nullptr);
  }

  if (demb) *demb = dx;
  if (opts.base) {
    if (cache.from_embeddings) {
      grads.pos_emb.topRows(T) += dx;
    } else {
      for (long i = 0; i < T; ++i) {
        grads.tok_emb.row(cache.ids[i]) += dx.row(i);
        grads.pos_emb.row(i) += dx.row(i);
      }
    }
  }
}

}  // namespace

void backward_predict(const RegressionLM& model, const ForwardCache& cache, double dscalar,
                      RegressionLM& grads, const BackwardOptions& opts, Mat* demb) {
  long T = cache.h.rows();
  long last = cache.attn_len - 1;
  if (opts.head) {
    grads.head_w.noalias() += dscalar * cache.h.row(last).transpose();
    grads.head_b += dscalar;
  }
  Mat dh = Mat::Zero(T, model.config.d_model);
  dh.row(last) = dscalar * model.head_w.transpose();
  backward_hidden(model, cache, dh, grads, opts, demb);
}

void backward_lm(const RegressionLM& model, const ForwardCache& cache, const Mat& dlogits,
                 RegressionLM& grads, const BackwardOptions& opts) {
  Mat dh = dlogits * model.tok_emb;
  if (opts.base) grads.tok_emb.noalias() += dlogits.transpose() * cache.h;
  backward_hidden(model, cache, dh, grads, opts, nullptr);
}

void apply_lora(RegressionLM& model, const LoraConfig& config, uint64_t seed) {
  if (model.lora) fail_invalid("adapters already applied");
  if (config.rank < 1) fail_invalid("lora rank must be >= 1");
  if (config.alpha <= 0) fail_invalid("lora alpha must be > 0");
  if (config.dropout < 0 || config.dropout >= 1) fail_invalid("lora dropout must lie in [0, 1)");
  Rng rng(seed);
  int d = model.config.d_model;
  for (LayerParams& layer : model.layers) {
    for (auto* slot : {&layer.lora_q, &layer.lora_v}) {
      LoraAdapter adapter;
      adapter.a.resize(d, config.rank);
      fill_normal(adapter.a, rng, 0.02);
      adapter.b = Mat::Zero(config.rank, d);
      *slot = std::move(adapter);
    }
  }
  model.lora = config;
}

void merge_lora(RegressionLM& model) {
  if (!model.lora) fail_invalid("no adapters applied");
  double scale = model.lora->alpha / model.lora->rank;
  for (LayerParams& layer : model.layers) {
    layer.wq.noalias() += scale * (layer.lora_q->a * layer.lora_q->b);
    layer.wv.noalias() += scale * (layer.lora_v->a * layer.lora_v->b);
    layer.lora_q.reset();
    layer.lora_v.reset();
  }
  model.lora.reset();
}

}  // namespace forecite
