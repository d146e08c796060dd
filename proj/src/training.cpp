#include "training.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "rng.hpp"
#include "textcodec.hpp"

namespace forecite {

using json = nlohmann::json;

namespace {

constexpr char kMagic[] = "FORECITE1";
constexpr size_t kMagicLen = 9;

void validate_phase_config(const PhaseConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0)) fail_invalid("training: learning_rate must be >= 0");
  if (!(cfg.weight_decay >= 0.0)) fail_invalid("training: weight_decay must be >= 0");
  if (cfg.grad_accum_steps < 1) fail_invalid("training: grad_accum_steps must be >= 1");
  if (cfg.batch_size < 1) fail_invalid("training: batch_size must be >= 1");
  if (cfg.epochs < 1) fail_invalid("training: epochs must be >= 1");
}

void validate_training_set(const std::vector<std::string>& texts, const std::vector<double>& targets) {
  if (texts.empty()) fail_invalid("training: empty training set");
  if (texts.size() != targets.size()) fail_invalid("training: texts and targets differ in length");
}

// Micro-batch index groups for one epoch; order is a pure function of
// (seed, epoch) so interrupted runs can be replayed.
std::vector<std::vector<size_t>> epoch_batches(size_t n, int batch_size, uint64_t seed, int epoch) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng(seed).fork(static_cast<uint64_t>(epoch)).shuffle(order);
  std::vector<std::vector<size_t>> batches;
  for (size_t at = 0; at < n; at += static_cast<size_t>(batch_size)) {
    size_t end = std::min(n, at + static_cast<size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<long>(at), order.begin() + static_cast<long>(end));
  }
  return batches;
}

long total_optimizer_steps(size_t n, const PhaseConfig& cfg) {
  size_t per_epoch = (n + static_cast<size_t>(cfg.batch_size) - 1) / static_cast<size_t>(cfg.batch_size);
  size_t micro = per_epoch * static_cast<size_t>(cfg.epochs);
  return static_cast<long>((micro + static_cast<size_t>(cfg.grad_accum_steps) - 1) /
                           static_cast<size_t>(cfg.grad_accum_steps));
}

void scale_refs(const std::vector<ParamRef>& refs, const FreezeMask& mask, double factor) {
  for (const auto& ref : refs) {
    if (!mask.trainable(ref.name)) continue;
    Eigen::Map<Eigen::VectorXd>(ref.data, ref.rows * ref.cols) *= factor;
  }
}

void zero_refs(const std::vector<ParamRef>& refs, const FreezeMask& mask) {
  for (const auto& ref : refs) {
    if (!mask.trainable(ref.name)) continue;
    Eigen::Map<Eigen::VectorXd>(ref.data, ref.rows * ref.cols).setZero();
  }
}

void write_u64_le(std::ostream& out, uint64_t value) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

uint64_t read_u64_le(std::istream& in, const char* what) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (in.gcount() != 8) fail_parse(std::string("checkpoint: truncated ") + what);
  uint64_t value = 0;
  for (int i = 0; i < 8; ++i) value |= static_cast<uint64_t>(bytes[i]) << (8 * i);
  return value;
}

void write_doubles(std::ostream& out, const double* data, long count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count) * 8);
}

void read_doubles(std::istream& in, double* data, long count, const std::string& name) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count) * 8);
  if (in.gcount() != static_cast<std::streamsize>(count) * 8)
    fail_parse("checkpoint: truncated array " + name);
}

}  // namespace

PhaseConfig finetune_defaults() {
  PhaseConfig cfg;
  cfg.grad_accum_steps = 16;
  cfg.batch_size = 1;
  cfg.epochs = 3;
  return cfg;
}

double cosine_lr(long step, long total_steps, double base_lr) {
  if (total_steps < 1) fail_invalid("cosine_lr: total_steps must be >= 1");
  if (step < 0 || step > total_steps) fail_invalid("cosine_lr: step outside [0, total_steps]");
  return base_lr * 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(step) / static_cast<double>(total_steps)));
}

void AdamW::step(std::vector<ParamRef>& params, const std::vector<ParamRef>& grads, double lr) {
  if (params.size() != grads.size()) fail_invalid("adamw: parameter/gradient list length mismatch");
  state_.global_step += 1;
  double t = static_cast<double>(state_.global_step);
  double bc1 = 1.0 - std::pow(cfg_.beta1, t);
  double bc2 = 1.0 - std::pow(cfg_.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    const auto& g = grads[i];
    if (p.name != g.name || p.rows != g.rows || p.cols != g.cols)
      fail_invalid("adamw: parameter/gradient mismatch at " + p.name);
    if (!mask_.trainable(p.name)) continue;
    long n = p.rows * p.cols;
    auto [it, fresh] = state_.moments.try_emplace(p.name, Vec::Zero(n), Vec::Zero(n));
    Vec& m = it->second.first;
    Vec& v = it->second.second;
    Eigen::Map<Eigen::VectorXd> theta(p.data, n);
    Eigen::Map<const Eigen::VectorXd> grad(g.data, n);
    m.array() = cfg_.beta1 * m.array() + (1.0 - cfg_.beta1) * grad.array();
    v.array() = cfg_.beta2 * v.array() + (1.0 - cfg_.beta2) * grad.array().square();
    if (p.decay) theta *= (1.0 - lr * cfg_.weight_decay);
    theta.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg_.eps);
  }
}

TrainResult train_phase1(RegressionLM& model, const std::vector<std::string>& texts,
                         const std::vector<double>& targets, const PhaseConfig& cfg) {
  validate_phase_config(cfg);
  validate_training_set(texts, targets);
  const size_t n = texts.size();
  const long d = model.config.d_model;

  // The base (and any attached adapters) is frozen, so last-hidden features
  // are constant across the run and can be extracted once.
  Mat features(n, d);
  for (size_t i = 0; i < n; ++i) {
    TokenSequence seq = encode(texts[i], model.config.max_seq_len);
    Mat h = forward_hidden(model, seq.ids, seq.attention_len);
    features.row(static_cast<long>(i)) = h.row(seq.attention_len - 1);
  }

  FreezeMask mask{false, false, true};
  AdamW adam(cfg, mask);
  Vec gw = Vec::Zero(d);
  double gb = 0.0;
  std::vector<ParamRef> params = {
      {"head_w", model.head_w.data(), d, 1, true},
      {"head_b", &model.head_b, 1, 1, false},
  };
  std::vector<ParamRef> grads = {
      {"head_w", gw.data(), d, 1, true},
      {"head_b", &gb, 1, 1, false},
  };

  TrainResult result;
  const long total_steps = total_optimizer_steps(n, cfg);
  long opt_step = 0;
  int pending = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& batch : epoch_batches(n, cfg.batch_size, cfg.seed, epoch)) {
      const double inv_b = 1.0 / static_cast<double>(batch.size());
      double loss = 0.0;
      for (size_t idx : batch) {
        double pred = features.row(static_cast<long>(idx)).dot(model.head_w) + model.head_b;
        double err = pred - targets[idx];
        loss += err * err * inv_b;
        double dpred = 2.0 * err * inv_b;
        gw += dpred * features.row(static_cast<long>(idx)).transpose();
        gb += dpred;
      }
      result.loss_trace.push_back(loss);
      if (++pending == cfg.grad_accum_steps) {
        gw /= static_cast<double>(pending);
        gb /= static_cast<double>(pending);
        adam.step(params, grads, cosine_lr(opt_step, total_steps, cfg.learning_rate));
        gw.setZero();
        gb = 0.0;
        pending = 0;
        ++opt_step;
      }
    }
  }
  if (pending > 0) {
    gw /= static_cast<double>(pending);
    gb /= static_cast<double>(pending);
    adam.step(params, grads, cosine_lr(opt_step, total_steps, cfg.learning_rate));
  }
  return result;
}

TrainResult train_phase2(RegressionLM& model, const std::vector<std::string>& texts,
                         const std::vector<double>& targets, const PhaseConfig& cfg,
                         const LoraConfig& lora_cfg) {
  validate_phase_config(cfg);
  validate_training_set(texts, targets);
  if (model.lora) fail_invalid("train_phase2: adapters already attached");
  apply_lora(model, lora_cfg, cfg.seed);

  const size_t n = texts.size();
  std::vector<TokenSequence> encoded(n);
  for (size_t i = 0; i < n; ++i) encoded[i] = encode(texts[i], model.config.max_seq_len);

  FreezeMask mask{false, true, true};
  BackwardOptions bopts{false, true, true};
  AdamW adam(cfg, mask);
  RegressionLM grad_store = zeros_like(model);
  std::vector<ParamRef> params = param_refs(model);
  std::vector<ParamRef> grads = param_refs(grad_store);
  Rng drop_rng = Rng(cfg.seed).fork(0xD0);

  TrainResult result;
  const long total_steps = total_optimizer_steps(n, cfg);
  long opt_step = 0;
  int pending = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& batch : epoch_batches(n, cfg.batch_size, cfg.seed, epoch)) {
      const double inv_b = 1.0 / static_cast<double>(batch.size());
      double loss = 0.0;
      for (size_t idx : batch) {
        ForwardCache cache;
        ForwardOptions fopts;
        fopts.training = true;
        fopts.dropout_rng = &drop_rng;
        double pred = predict(model, encoded[idx].ids, encoded[idx].attention_len, &cache, fopts);
        double err = pred - targets[idx];
        loss += err * err * inv_b;
        backward_predict(model, cache, 2.0 * err * inv_b, grad_store, bopts);
      }
      result.loss_trace.push_back(loss);
      if (++pending == cfg.grad_accum_steps) {
        scale_refs(grads, mask, 1.0 / static_cast<double>(pending));
        adam.step(params, grads, cosine_lr(opt_step, total_steps, cfg.learning_rate));
        zero_refs(grads, mask);
        pending = 0;
        ++opt_step;
      }
    }
  }
  if (pending > 0) {
    scale_refs(grads, mask, 1.0 / static_cast<double>(pending));
    adam.step(params, grads, cosine_lr(opt_step, total_steps, cfg.learning_rate));
  }
  return result;
}

TrainResult pretrain_lm(RegressionLM& model, const std::vector<std::string>& texts,
                        const PhaseConfig& cfg) {
  validate_phase_config(cfg);
  if (texts.empty()) fail_invalid("training: empty training set");
  if (model.lora) fail_invalid("pretrain_lm: model already has adapters attached");

  const size_t n = texts.size();
  std::vector<TokenSequence> encoded(n);
  for (size_t i = 0; i < n; ++i) encoded[i] = encode(texts[i], model.config.max_seq_len);

  FreezeMask mask{true, false, false};
  BackwardOptions bopts{true, false, false};
  AdamW adam(cfg, mask);
  RegressionLM grad_store = zeros_like(model);
  std::vector<ParamRef> params = param_refs(model);
  std::vector<ParamRef> grads = param_refs(grad_store);

  TrainResult result;
  const long total_steps = total_optimizer_steps(n, cfg);
  long opt_step = 0;
  int pending = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& batch : epoch_batches(n, cfg.batch_size, cfg.seed, epoch)) {
      long transitions = 0;
      for (size_t idx : batch) transitions += encoded[idx].attention_len - 1;
      const double inv_n = 1.0 / static_cast<double>(transitions);
      double loss = 0.0;
      for (size_t idx : batch) {
        const auto& seq = encoded[idx];
        ForwardCache cache;
        Mat logits = lm_logits(model, seq.ids, seq.attention_len, &cache);
        Mat dlogits = Mat::Zero(logits.rows(), logits.cols());
        for (int i = 0; i + 1 < seq.attention_len; ++i) {
          int target = seq.ids[static_cast<size_t>(i) + 1];
          double row_max = logits.row(i).maxCoeff();
          Eigen::ArrayXd ex = (logits.row(i).array() - row_max).exp();
          double denom = ex.sum();
          loss += (std::log(denom) - (logits(i, target) - row_max)) * inv_n;
          dlogits.row(i) = (ex / denom).matrix() * inv_n;
          dlogits(i, target) -= inv_n;
        }
        backward_lm(model, cache, dlogits, grad_store, bopts);
      }
      result.loss_trace.push_back(loss);
      if (++pending == cfg.grad_accum_steps) {
        scale_refs(grads, mask, 1.0 / static_cast<double>(pending));
        adam.step(params, grads, cosine_lr(opt_step, total_steps, cfg.learning_rate));
        zero_refs(grads, mask);
        pending = 0;
        ++opt_step;
      }
    }
  }
  if (pending > 0) {
    scale_refs(grads, mask, 1.0 / static_cast<double>(pending));
    adam.step(params, grads, cosine_lr(opt_step, total_steps, cfg.learning_rate));
  }
  return result;
}

namespace {

json config_to_json(const ModelConfig& config) {
  return json{{"vocab_size", config.vocab_size}, {"d_model", config.d_model},
              {"n_layers", config.n_layers},     {"n_heads", config.n_heads},
              {"d_ff", config.d_ff},             {"max_seq_len", config.max_seq_len},
              {"init_seed", config.init_seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig config;
  config.vocab_size = j.at("vocab_size").get<int>();
  config.d_model = j.at("d_model").get<int>();
  config.n_layers = j.at("n_layers").get<int>();
  config.n_heads = j.at("n_heads").get<int>();
  config.d_ff = j.at("d_ff").get<int>();
  config.max_seq_len = j.at("max_seq_len").get<int>();
  config.init_seed = j.at("init_seed").get<uint64_t>();
  return config;
}

}  // namespace

void save_checkpoint(const std::string& path, RegressionLM& model, const TargetStats& stats,
                     const TrainState* state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_io("checkpoint: cannot open " + path + " for writing");

  std::vector<ParamRef> refs = param_refs(model);
  json arrays = json::array();
  for (const auto& ref : refs) arrays.push_back({{"name", ref.name}, {"rows", ref.rows}, {"cols", ref.cols}});
  if (state != nullptr) {
    for (const auto& [name, mv] : state->moments) {
      arrays.push_back({{"name", "opt_m." + name}, {"rows", mv.first.size()}, {"cols", 1}});
      arrays.push_back({{"name", "opt_v." + name}, {"rows", mv.second.size()}, {"cols", 1}});
    }
  }

  json header;
  header["config"] = config_to_json(model.config);
  if (model.lora) {
    header["lora"] = json{{"rank", model.lora->rank},
                          {"alpha", model.lora->alpha},
                          {"dropout", model.lora->dropout}};
  } else {
    header["lora"] = nullptr;
  }
  header["target_stats"] = json::parse(target_stats_to_json(stats));
  header["train_state"] = state ? json{{"global_step", state->global_step}} : json(nullptr);
  header["arrays"] = arrays;

  std::string header_text = header.dump();
  out.write(kMagic, static_cast<std::streamsize>(kMagicLen));
  write_u64_le(out, header_text.size());
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& ref : refs) write_doubles(out, ref.data, ref.rows * ref.cols);
  if (state != nullptr) {
    for (const auto& [name, mv] : state->moments) {
      write_doubles(out, mv.first.data(), mv.first.size());
      write_doubles(out, mv.second.data(), mv.second.size());
    }
  }
  if (!out) fail_io("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("checkpoint: cannot open " + path);

  char magic[kMagicLen];
  in.read(magic, static_cast<std::streamsize>(kMagicLen));
  if (in.gcount() != static_cast<std::streamsize>(kMagicLen) ||
      std::memcmp(magic, kMagic, kMagicLen) != 0)
    fail_parse("checkpoint: bad magic (not a checkpoint file or unsupported version)");

  uint64_t header_len = read_u64_le(in, "header length");
  if (header_len == 0 || header_len > (1ULL << 30)) fail_parse("checkpoint: implausible header length");
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (in.gcount() != static_cast<std::streamsize>(header_len)) fail_parse("checkpoint: truncated header");

  json header = json::parse(header_text, nullptr, false);
  if (header.is_discarded()) fail_parse("checkpoint: header is not valid JSON");

  Checkpoint ckpt;
  try {
    ModelConfig config = config_from_json(header.at("config"));
    ckpt.model = init_model(config);
    if (!header.at("lora").is_null()) {
      LoraConfig lcfg;
      lcfg.rank = header["lora"].at("rank").get<int>();
      lcfg.alpha = header["lora"].at("alpha").get<double>();
      lcfg.dropout = header["lora"].at("dropout").get<double>();
      apply_lora(ckpt.model, lcfg, 0);
    }
    ckpt.stats = target_stats_from_json(header.at("target_stats").dump());

    std::vector<ParamRef> refs = param_refs(ckpt.model);
    const json& arrays = header.at("arrays");
    if (!arrays.is_array() || arrays.size() < refs.size())
      fail_parse("checkpoint: array table does not cover the model parameters");
    for (size_t i = 0; i < refs.size(); ++i) {
      const json& entry = arrays.at(i);
      if (entry.at("name").get<std::string>() != refs[i].name ||
          entry.at("rows").get<long>() != refs[i].rows || entry.at("cols").get<long>() != refs[i].cols)
        fail_parse("checkpoint: array table mismatch at " + refs[i].name);
      read_doubles(in, refs[i].data, refs[i].rows * refs[i].cols, refs[i].name);
    }

    if (!header.at("train_state").is_null()) {
      TrainState state;
      state.global_step = header["train_state"].at("global_step").get<long long>();
      for (size_t i = refs.size(); i < arrays.size(); ++i) {
        const json& entry = arrays.at(i);
        std::string name = entry.at("name").get<std::string>();
        long rows = entry.at("rows").get<long>();
        bool is_m = name.rfind("opt_m.", 0) == 0;
        bool is_v = name.rfind("opt_v.", 0) == 0;
        if (!is_m && !is_v) fail_parse("checkpoint: unexpected array " + name);
        std::string key = name.substr(6);
        auto& mv = state.moments.try_emplace(key, Vec(), Vec()).first->second;
        Vec& slot = is_m ? mv.first : mv.second;
        slot.resize(rows);
        read_doubles(in, slot.data(), rows, name);
      }
      for (const auto& [key, mv] : state.moments)
        if (mv.first.size() == 0 || mv.second.size() == 0 || mv.first.size() != mv.second.size())
          fail_parse("checkpoint: incomplete optimizer moments for " + key);
      ckpt.state = std::move(state);
    } else if (arrays.size() != refs.size()) {
      fail_parse("checkpoint: unexpected extra arrays without a training state");
    }
  } catch (const json::exception& e) {
    fail_parse(std::string("checkpoint: malformed header: ") + e.what());
  }

  char extra;
  in.read(&extra, 1);
  if (!in.eof()) fail_parse("checkpoint: trailing bytes after the last array");
  return ckpt;
}

}  // namespace forecite
