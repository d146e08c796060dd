#pragma once

#include <string>
#include <vector>

#include "corpus.hpp"
#include "model.hpp"
#include "training.hpp"

namespace forecite {

struct GridPoint {
  double params_b = 0.0;   // model size, billions of parameters
  double data_pct = 0.0;   // data volume, percent of corpus (1..100)
  std::string split;       // train | test
  std::string metric;      // r | rho | r2 | mse | mae
  double value = 0.0;
};

struct ScalingFit {
  std::string metric;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double residual_mae = 0.0;
};

// tanh(beta0 + beta1 * log2(p) + beta2 * log2(d)).
double predict_scaling(const ScalingFit& fit, double params_b, double data_pct);

// Damped Gauss-Newton least squares on points from a single metric/split;
// insensitive to input order.
ScalingFit fit_scaling(std::vector<GridPoint> points);

std::string scaling_fit_to_json(const ScalingFit& fit);

std::vector<GridPoint> parse_grid_csv(const std::string& text);
std::string grid_to_csv(std::vector<GridPoint> points);
std::vector<GridPoint> load_grid_csv(const std::string& path);

// Keep points for one (metric, split) pair.
std::vector<GridPoint> select_grid(const std::vector<GridPoint>& points, const std::string& metric,
                                   const std::string& split);

struct GridRecipe {
  PhaseConfig phase1;
  PhaseConfig phase2;
  LoraConfig lora;
  double split_ratio = 0.9;
  uint64_t split_seed = 0;
  uint64_t subsample_seed = 0;
  const RegressionLM* initial_model = nullptr;  // start cells from this base instead of a fresh init
  int workers = 1;
};

// One cell per (config, fraction): deterministically subsample the train
// split, train both phases, score train and test; cells run on a bounded
// worker pool and results are keyed by cell, not completion order.
std::vector<GridPoint> run_grid(const std::vector<DocumentRecord>& docs,
                                const std::vector<ModelConfig>& configs,
                                const std::vector<double>& fractions, const GridRecipe& recipe);

struct GridDelta {
  double params_b = 0.0;
  double data_pct = 0.0;
  std::string split;
  std::string metric;
  double delta = 0.0;  // value_a - value_b
};

struct GridComparison {
  std::vector<GridDelta> deltas;
  long long positive = 0;
  long long negative = 0;
  long long zero = 0;
};

GridComparison compare_checkpoints(const std::vector<GridPoint>& grid_a,
                                   const std::vector<GridPoint>& grid_b);

}  // namespace forecite
