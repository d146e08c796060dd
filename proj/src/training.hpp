#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "targets.hpp"

namespace forecite {

struct PhaseConfig {
  double learning_rate = 1e-4;
  double weight_decay = 1e-2;
  int grad_accum_steps = 4;
  int batch_size = 2;
  int epochs = 1;
  uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Table-5 fine-tuning column; the training column is the struct default.
PhaseConfig finetune_defaults();

// base_lr * 0.5 * (1 + cos(pi * step / total)); no warmup, decays to 0.
double cosine_lr(long step, long total_steps, double base_lr);

struct TrainState {
  long long global_step = 0;
  // name -> (first moment, second moment), flattened.
  std::map<std::string, std::pair<Vec, Vec>> moments;
};

class AdamW {
 public:
  AdamW(const PhaseConfig& cfg, const FreezeMask& mask) : cfg_(cfg), mask_(mask) {}

  // Decoupled weight decay on decay-flagged trainable parameters; moments are
  // created lazily and exist exactly for the trainable set.
  void step(std::vector<ParamRef>& params, const std::vector<ParamRef>& grads, double lr);

  TrainState& state() { return state_; }

 private:
  PhaseConfig cfg_;
  FreezeMask mask_;
  TrainState state_;
};

struct TrainResult {
  std::vector<double> loss_trace;  // one mean loss per micro-batch
};

// Phase 1: base frozen, head trained on cached last-hidden features (the
// frozen base makes them constant, so this is exact).
TrainResult train_phase1(RegressionLM& model, const std::vector<std::string>& texts,
                         const std::vector<double>& targets, const PhaseConfig& cfg);

// Phase 2: attaches adapters and trains adapters + head jointly.
TrainResult train_phase2(RegressionLM& model, const std::vector<std::string>& texts,
                         const std::vector<double>& targets, const PhaseConfig& cfg,
                         const LoraConfig& lora_cfg);

// Next-token cross-entropy over the rendered documents (tied embeddings).
TrainResult pretrain_lm(RegressionLM& model, const std::vector<std::string>& texts,
                        const PhaseConfig& cfg);

void save_checkpoint(const std::string& path, RegressionLM& model, const TargetStats& stats,
                     const TrainState* state = nullptr);

struct Checkpoint {
  RegressionLM model;
  TargetStats stats;
  std::optional<TrainState> state;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace forecite
