#pragma once

#include <string>
#include <vector>

#include "corpus.hpp"

namespace forecite {

// max(1, whole months between publication and the citation-count cutoff).
int months_elapsed(const YearMonth& pub, const YearMonth& cutoff);

double monthly_rate(long long citations, int months);

// ln(rate + delta); delta keeps zero-citation documents finite.
double log_rate(double rate, double delta);

struct TargetStats {
  double mu = 0.0;
  double sigma = 1.0;
  double delta = 1.0 / 299.0;
  YearMonth cutoff{2024, 12};
};

// mu = sample mean, sigma = population standard deviation of the train-split
// log rates. Never sees test values.
TargetStats fit_stats(const std::vector<double>& train_log_rates, double delta,
                      const YearMonth& cutoff);

double standardize(double value, const TargetStats& stats);
double destandardize(double value, const TargetStats& stats);

// Convenience: the full transform for one document (requires a date).
double doc_log_rate(const DocumentRecord& doc, double delta, const YearMonth& cutoff);

std::string target_stats_to_json(const TargetStats& stats);
TargetStats target_stats_from_json(const std::string& text);

}  // namespace forecite
