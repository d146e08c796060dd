#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "textcodec.hpp"

using namespace forecite;

namespace {

ModelConfig tiny_config(uint64_t seed = 3) {
  ModelConfig c;
  c.d_model = 16;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_ff = 32;
  c.max_seq_len = 16;
  c.init_seed = seed;
  return c;
}

std::vector<int> sample_ids() {
  return {kBosToken, 'h', 'e', 'l', 'l', 'o', '!', kEosToken};
}

// Gives the otherwise-zero head and adapter-B factors generic values so every
// parameter group carries gradient signal.
void randomize_readout(RegressionLM& model, uint64_t seed) {
  Rng rng(seed);
  for (long i = 0; i < model.head_w.size(); ++i) model.head_w(i) = 0.5 * rng.normal();
  model.head_b = 0.1 * rng.normal();
  for (LayerParams& layer : model.layers) {
    for (auto* slot : {&layer.lora_q, &layer.lora_v}) {
      if (!*slot) continue;
      Mat& b = (*slot)->b;
      for (long i = 0; i < b.size(); ++i) b.data()[i] = 0.05 * rng.normal();
    }
  }
}

bool models_equal(RegressionLM& a, RegressionLM& b) {
  auto ra = param_refs(a);
  auto rb = param_refs(b);
  if (ra.size() != rb.size()) return false;
  for (size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].name != rb[i].name || ra[i].rows != rb[i].rows || ra[i].cols != rb[i].cols) {
      return false;
    }
    for (long k = 0; k < ra[i].rows * ra[i].cols; ++k) {
      if (ra[i].data[k] != rb[i].data[k]) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("parameter count closed form matches the enumerated parameters") {
  ModelConfig base;  // d 64, L 2, dff 256, max_seq_len 512, vocab 259
  CHECK(param_count(base) == 148033);

  for (ModelConfig cfg : {base, tiny_config()}) {
    RegressionLM model = init_model(cfg);
    long long listed = 0;
    for (const ParamRef& ref : param_refs(model)) listed += ref.rows * ref.cols;
    CHECK(listed == param_count(cfg));
  }

  ModelConfig bad = tiny_config();
  bad.n_heads = 3;  // does not divide d_model = 16
  CHECK_THROWS_AS(init_model(bad), Error);
  bad = tiny_config();
  bad.d_model = 0;
  CHECK_THROWS_AS(init_model(bad), Error);
}

TEST_CASE("initialization is seed-deterministic with a zero head and unit norms") {
  RegressionLM a = init_model(tiny_config(7));
  RegressionLM b = init_model(tiny_config(7));
  CHECK(models_equal(a, b));
  RegressionLM c = init_model(tiny_config(8));
  CHECK_FALSE(models_equal(a, c));

  CHECK(a.head_w.isZero(0.0));
  CHECK(a.head_b == 0.0);
  CHECK((a.final_norm.array() == 1.0).all());
  for (const LayerParams& layer : a.layers) {
    CHECK((layer.attn_norm.array() == 1.0).all());
    CHECK((layer.ffn_norm.array() == 1.0).all());
  }

  // Residual projections are initialized with a tighter scale than the rest.
  ModelConfig wide = tiny_config(9);
  wide.d_model = 64;
  wide.n_heads = 4;
  wide.d_ff = 256;
  RegressionLM w = init_model(wide);
  auto std_of = [](const Mat& m) {
    return std::sqrt(m.array().square().mean());
  };
  CHECK(std_of(w.layers[0].wq) == doctest::Approx(0.02).epsilon(0.15));
  CHECK(std_of(w.layers[0].wo) == doctest::Approx(0.02 / std::sqrt(4.0)).epsilon(0.15));
  CHECK(std_of(w.layers[0].w2) == doctest::Approx(0.02 / std::sqrt(4.0)).epsilon(0.15));
}

TEST_CASE("parameter names are unique and stable") {
  RegressionLM model = init_model(tiny_config());
  apply_lora(model, LoraConfig{}, 11);
  std::set<std::string> names;
  for (const ParamRef& ref : param_refs(model)) names.insert(ref.name);
  CHECK(names.size() == param_refs(model).size());
  CHECK(names.count("tok_emb") == 1);
  CHECK(names.count("layers.0.wq") == 1);
  CHECK(names.count("layers.1.wv.lora_b") == 1);
  CHECK(names.count("head_w") == 1);
  CHECK(names.count("head_b") == 1);
}

TEST_CASE("a zero head predicts exactly zero") {
  RegressionLM model = init_model(tiny_config());
  CHECK(predict(model, sample_ids(), 8) == 0.0);
  CHECK(predict_text(model, "anything at all") == 0.0);
}

TEST_CASE("sequence validation rejects malformed inputs") {
  RegressionLM model = init_model(tiny_config());
  CHECK_THROWS_AS(predict(model, {}, 1), Error);
  CHECK_THROWS_AS(predict(model, sample_ids(), 0), Error);
  CHECK_THROWS_AS(predict(model, sample_ids(), 9), Error);
  CHECK_THROWS_AS(predict(model, {kBosToken, 300, kEosToken}, 3), Error);
  CHECK_THROWS_AS(predict(model, {kBosToken, -1, kEosToken}, 3), Error);
  std::vector<int> too_long(17, 'a');
  CHECK_THROWS_AS(predict(model, too_long, 17), Error);
}

TEST_CASE("causality: a future token cannot influence earlier positions") {
  RegressionLM model = init_model(tiny_config(21));
  randomize_readout(model, 4);
  std::vector<int> ids = sample_ids();
  Mat h_before = forward_hidden(model, ids, 8);
  Mat logits_before = lm_logits(model, ids, 8);

  for (int flip_pos : {3, 5, 7}) {
    std::vector<int> altered = ids;
    altered[flip_pos] = 'Z';
    Mat h_after = forward_hidden(model, altered, 8);
    Mat logits_after = lm_logits(model, altered, 8);
    for (int i = 0; i < flip_pos; ++i) {
      CHECK((h_before.row(i).array() == h_after.row(i).array()).all());
      CHECK((logits_before.row(i).array() == logits_after.row(i).array()).all());
    }
    // The altered position itself must change (it attends to itself).
    CHECK((h_before.row(flip_pos).array() != h_after.row(flip_pos).array()).any());
  }
}

TEST_CASE("padding beyond the attention length never changes the output") {
  RegressionLM model = init_model(tiny_config(22));
  randomize_readout(model, 5);
  std::vector<int> ids = sample_ids();
  double y = predict(model, ids, 8);
  Mat h = forward_hidden(model, ids, 8);

  std::vector<int> padded = ids;
  padded.insert(padded.end(), 5, kPadToken);
  CHECK(predict(model, padded, 8) == y);
  Mat h_padded = forward_hidden(model, padded, 8);
  for (int i = 0; i < 8; ++i) CHECK((h.row(i).array() == h_padded.row(i).array()).all());

  // Garbage in the padding region is equally invisible.
  std::vector<int> garbage = padded;
  garbage[10] = 'X';
  garbage[12] = 'Q';
  CHECK(predict(model, garbage, 8) == y);
}

TEST_CASE("forward from embeddings matches token-id prediction") {
  RegressionLM model = init_model(tiny_config(23));
  randomize_readout(model, 6);
  std::vector<int> ids = sample_ids();
  double y = predict(model, ids, 8);

  Mat emb(8, model.config.d_model);
  for (int i = 0; i < 8; ++i) emb.row(i) = model.tok_emb.row(ids[i]);
  CHECK(forward_from_embeddings(model, emb, 8) == y);

  // Perturbing a padding row leaves the prediction untouched.
  Mat with_pad(10, model.config.d_model);
  with_pad.setZero();
  with_pad.topRows(8) = emb;
  with_pad.row(8) = model.tok_emb.row(kPadToken);
  with_pad.row(9) = model.tok_emb.row(kPadToken);
  double y_pad = forward_from_embeddings(model, with_pad, 8);
  CHECK(y_pad == y);
  with_pad.row(9).setConstant(17.0);
  CHECK(forward_from_embeddings(model, with_pad, 8) == y);

  CHECK_THROWS_AS(forward_from_embeddings(model, Mat::Zero(20, 16), 20), Error);
  CHECK_THROWS_AS(forward_from_embeddings(model, Mat::Zero(4, 8), 4), Error);
}

TEST_CASE("batched prediction equals one-at-a-time prediction") {
  RegressionLM model = init_model(tiny_config(24));
  randomize_readout(model, 7);
  std::vector<std::string> texts = {"alpha", "be", "gamma ray", ""};
  TokenBatch batch = batch_encode(texts, model.config.max_seq_len);
  std::vector<double> batched = predict_batch(model, batch);
  REQUIRE(batched.size() == texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    CHECK(batched[i] == doctest::Approx(predict_text(model, texts[i])).epsilon(1e-12));
  }
}

TEST_CASE("lm logits have tied-embedding shape and finite values") {
  RegressionLM model = init_model(tiny_config(25));
  std::vector<int> ids = sample_ids();
  Mat logits = lm_logits(model, ids, 8);
  CHECK(logits.rows() == 8);
  CHECK(logits.cols() == kVocabSize);
  CHECK(logits.allFinite());
}

TEST_CASE("freshly attached adapters are an exact no-op") {
  RegressionLM model = init_model(tiny_config(26));
  randomize_readout(model, 8);
  std::vector<int> ids = sample_ids();
  double before = predict(model, ids, 8);

  apply_lora(model, LoraConfig{}, 99);
  REQUIRE(model.lora.has_value());
  for (const LayerParams& layer : model.layers) {
    REQUIRE(layer.lora_q.has_value());
    REQUIRE(layer.lora_v.has_value());
    CHECK(layer.lora_q->b.isZero(0.0));
    CHECK(layer.lora_v->b.isZero(0.0));
  }
  CHECK(predict(model, ids, 8) == before);

  CHECK_THROWS_AS(apply_lora(model, LoraConfig{}, 99), Error);
}

TEST_CASE("adapter constraints are validated") {
  RegressionLM model = init_model(tiny_config());
  LoraConfig bad;
  bad.rank = 0;
  CHECK_THROWS_AS(apply_lora(model, bad, 1), Error);
  bad = LoraConfig{};
  bad.alpha = 0.0;
  CHECK_THROWS_AS(apply_lora(model, bad, 1), Error);
  bad = LoraConfig{};
  bad.dropout = 1.0;
  CHECK_THROWS_AS(apply_lora(model, bad, 1), Error);
  CHECK_THROWS_AS(merge_lora(model), Error);
}

TEST_CASE("merging adapters preserves the function within 1e-6") {
  RegressionLM model = init_model(tiny_config(27));
  randomize_readout(model, 9);
  apply_lora(model, LoraConfig{}, 55);
  randomize_readout(model, 10);  // nonzero B so the adapters actually act

  std::vector<std::vector<int>> inputs = {sample_ids(), {kBosToken, 'x', kEosToken}};
  std::vector<double> before;
  for (const auto& ids : inputs) {
    before.push_back(predict(model, ids, static_cast<int>(ids.size())));
  }

  merge_lora(model);
  CHECK_FALSE(model.lora.has_value());
  for (const LayerParams& layer : model.layers) {
    CHECK_FALSE(layer.lora_q.has_value());
    CHECK_FALSE(layer.lora_v.has_value());
  }
  for (size_t i = 0; i < inputs.size(); ++i) {
    double after = predict(model, inputs[i], static_cast<int>(inputs[i].size()));
    CHECK(after == doctest::Approx(before[i]).epsilon(1e-6));
  }
}

TEST_CASE("trainable parameter counts follow the freeze mask") {
  ModelConfig cfg = tiny_config();
  RegressionLM model = init_model(cfg);

  FreezeMask head_only{false, false, true};
  CHECK(trainable_param_count(model, head_only) == cfg.d_model + 1);

  FreezeMask everything{true, true, true};
  CHECK(trainable_param_count(model, everything) == param_count(cfg));

  LoraConfig lora;
  apply_lora(model, lora, 5);
  FreezeMask adapters_and_head{false, true, true};
  long long per_adapter = static_cast<long long>(lora.rank) * (cfg.d_model + cfg.d_model);
  long long expected = cfg.d_model + 1 + cfg.n_layers * 2 * per_adapter;
  CHECK(trainable_param_count(model, adapters_and_head) == expected);
  CHECK(trainable_param_count(model, FreezeMask{false, false, false}) == 0);
}

TEST_CASE("analytic gradients match central finite differences") {
  ModelConfig cfg = tiny_config(31);
  RegressionLM model = init_model(cfg);
  apply_lora(model, LoraConfig{}, 77);
  randomize_readout(model, 13);

  std::vector<int> ids = sample_ids();
  const int attn_len = 8;

  ForwardCache cache;
  double y0 = predict(model, ids, attn_len, &cache);
  RegressionLM grads = zeros_like(model);
  Mat demb = Mat::Zero(attn_len, cfg.d_model);
  backward_predict(model, cache, 1.0, grads, BackwardOptions{}, &demb);

  auto refs = param_refs(model);
  auto gref = param_refs(grads);
  REQUIRE(refs.size() == gref.size());

  const double h = 1e-5;
  Rng pick(101);
  int checked = 0;
  for (size_t p = 0; p < refs.size(); ++p) {
    long n = refs[p].rows * refs[p].cols;
    for (int trial = 0; trial < 6; ++trial) {
      long k = static_cast<long>(pick.next_below(static_cast<uint64_t>(n)));
      if (refs[p].name == "tok_emb") {
        // Only rows of tokens present in the input carry gradient; aim there.
        long row = ids[pick.next_below(ids.size())];
        k = row * refs[p].cols + static_cast<long>(pick.next_below(refs[p].cols));
      }
      double saved = refs[p].data[k];
      refs[p].data[k] = saved + h;
      double up = predict(model, ids, attn_len);
      refs[p].data[k] = saved - h;
      double down = predict(model, ids, attn_len);
      refs[p].data[k] = saved;
      double fd = (up - down) / (2.0 * h);
      double an = gref[p].data[k];
      double tol = 1e-3 * std::max({std::abs(fd), std::abs(an), 1e-4});
      INFO(refs[p].name << "[" << k << "] fd=" << fd << " an=" << an);
      CHECK(std::abs(fd - an) <= tol);
      ++checked;
    }
  }
  CHECK(checked >= 100);

  // Input-embedding gradient against finite differences of the embedding path.
  Mat emb(attn_len, cfg.d_model);
  for (int i = 0; i < attn_len; ++i) emb.row(i) = model.tok_emb.row(ids[i]);
  CHECK(forward_from_embeddings(model, emb, attn_len) == doctest::Approx(y0).epsilon(1e-12));
  for (int trial = 0; trial < 25; ++trial) {
    long i = static_cast<long>(pick.next_below(attn_len));
    long j = static_cast<long>(pick.next_below(cfg.d_model));
    double saved = emb(i, j);
    emb(i, j) = saved + h;
    double up = forward_from_embeddings(model, emb, attn_len);
    emb(i, j) = saved - h;
    double down = forward_from_embeddings(model, emb, attn_len);
    emb(i, j) = saved;
    double fd = (up - down) / (2.0 * h);
    double an = demb(i, j);
    double tol = 1e-3 * std::max({std::abs(fd), std::abs(an), 1e-4});
    INFO("emb(" << i << "," << j << ") fd=" << fd << " an=" << an);
    CHECK(std::abs(fd - an) <= tol);
  }
}

TEST_CASE("lm backward gradients match finite differences of the cross-entropy") {
  ModelConfig cfg = tiny_config(41);
  cfg.vocab_size = kVocabSize;
  RegressionLM model = init_model(cfg);
  std::vector<int> ids = sample_ids();
  const int attn_len = 8;

  // Loss: mean next-token cross entropy over positions 0..T-2.
  auto loss_of = [&](const RegressionLM& m) {
    Mat logits = lm_logits(m, ids, attn_len);
    double total = 0.0;
    for (int i = 0; i + 1 < attn_len; ++i) {
      double mx = logits.row(i).maxCoeff();
      double denom = 0.0;
      for (long v = 0; v < logits.cols(); ++v) denom += std::exp(logits(i, v) - mx);
      total += -(logits(i, ids[i + 1]) - mx - std::log(denom));
    }
    return total / (attn_len - 1);
  };

  ForwardCache cache;
  Mat logits = lm_logits(model, ids, attn_len, &cache);
  Mat dlogits = Mat::Zero(attn_len, cfg.vocab_size);
  double inv_n = 1.0 / (attn_len - 1);
  for (int i = 0; i + 1 < attn_len; ++i) {
    double mx = logits.row(i).maxCoeff();
    double denom = 0.0;
    for (long v = 0; v < logits.cols(); ++v) denom += std::exp(logits(i, v) - mx);
    for (long v = 0; v < logits.cols(); ++v) {
      dlogits(i, v) = std::exp(logits(i, v) - mx) / denom * inv_n;
    }
    dlogits(i, ids[i + 1]) -= inv_n;
  }
  RegressionLM grads = zeros_like(model);
  backward_lm(model, cache, dlogits, grads, BackwardOptions{});

  auto refs = param_refs(model);
  auto gref = param_refs(grads);
  const double h = 1e-5;
  Rng pick(202);
  for (size_t p = 0; p < refs.size(); ++p) {
    if (refs[p].name == "head_w" || refs[p].name == "head_b") continue;  // unused by the LM path
    long n = refs[p].rows * refs[p].cols;
    for (int trial = 0; trial < 3; ++trial) {
      long k = static_cast<long>(pick.next_below(static_cast<uint64_t>(n)));
      if (refs[p].name == "tok_emb") {
        long row = ids[pick.next_below(ids.size())];
        k = row * refs[p].cols + static_cast<long>(pick.next_below(refs[p].cols));
      }
      double saved = refs[p].data[k];
      refs[p].data[k] = saved + h;
      double up = loss_of(model);
      refs[p].data[k] = saved - h;
      double down = loss_of(model);
      refs[p].data[k] = saved;
      double fd = (up - down) / (2.0 * h);
      double an = gref[p].data[k];
      double tol = 1e-3 * std::max({std::abs(fd), std::abs(an), 1e-4});
      INFO(refs[p].name << "[" << k << "] fd=" << fd << " an=" << an);
      CHECK(std::abs(fd - an) <= tol);
    }
  }
}

TEST_CASE("dropout masks only activate during training forward passes") {
  RegressionLM model = init_model(tiny_config(51));
  apply_lora(model, LoraConfig{}, 12);
  randomize_readout(model, 14);
  std::vector<int> ids = sample_ids();

  double inference_a = predict(model, ids, 8);
  double inference_b = predict(model, ids, 8);
  CHECK(inference_a == inference_b);

  Rng drop_rng(5);
  ForwardOptions train_opts;
  train_opts.training = true;
  train_opts.dropout_rng = &drop_rng;
  double trained = predict(model, ids, 8, nullptr, train_opts);
  // With dropout active the adapters see a rescaled input, so the output
  // generically differs from the deterministic inference path.
  CHECK(trained != inference_a);
}
