#pragma once

#include <string>
#include <vector>

#include "corpus.hpp"
#include "model.hpp"
#include "targets.hpp"

namespace forecite {

double pearson(const std::vector<double>& pred, const std::vector<double>& truth);

// Pearson on average ranks (ties share the mean of their positions).
double spearman(const std::vector<double>& pred, const std::vector<double>& truth);

// 1 - SS_res / SS_tot.
double r_squared(const std::vector<double>& pred, const std::vector<double>& truth);

double mae(const std::vector<double>& pred, const std::vector<double>& truth);
double mse(const std::vector<double>& pred, const std::vector<double>& truth);

struct MetricReport {
  double r = 0.0;
  double rho = 0.0;
  double r2 = 0.0;
  double mae = 0.0;
  double mse = 0.0;
  long long n = 0;
};

MetricReport compute_metrics(const std::vector<double>& pred, const std::vector<double>& truth);

std::string metric_report_to_json(const MetricReport& report);

// Standardized-space prediction for each rendered document.
std::vector<double> predict_docs(const RegressionLM& model, const std::vector<DocumentRecord>& docs);

// Standardized targets for each document (all must carry publication dates).
std::vector<double> standardized_targets(const std::vector<DocumentRecord>& docs, const TargetStats& stats);

enum class SplitSide { All, Train, Test };

// Predicts every selected document and scores it against the standardized
// targets. With a split, side picks which half; without one, all docs count.
MetricReport evaluate(const RegressionLM& model, const std::vector<DocumentRecord>& docs,
                      const TargetStats& stats, const SplitAssignment* split = nullptr,
                      SplitSide side = SplitSide::All);

struct HoldoutPoint {
  std::string month;
  double cumulative_r = 0.0;
  long long n = 0;
};

// Expanding-window Pearson over monthly cohorts; months whose cumulative
// sample is too small (or degenerate) are skipped.
std::vector<HoldoutPoint> temporal_holdout(const RegressionLM& model,
                                           const std::vector<DocumentRecord>& docs,
                                           const TargetStats& stats);

std::string holdout_to_csv(const std::vector<HoldoutPoint>& series);

enum class AblationField { Title, Abstract };

// Copies with the named field emptied; rendering then omits its block.
std::vector<DocumentRecord> ablate(const std::vector<DocumentRecord>& docs, AblationField field);

}  // namespace forecite
