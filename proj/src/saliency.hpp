#pragma once

#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "model.hpp"
#include "targets.hpp"

namespace forecite {

struct TokenAttribution {
  std::string text;             // rendered document the tokens came from
  std::vector<int> ids;         // BOS + bytes + EOS, no padding
  std::vector<double> scores;   // signed gradient-times-embedding, one per token
  double prediction = 0.0;      // standardized model output
  double log_rate = 0.0;        // destandardized prediction
  double scale = 0.0;           // max |raw score| captured by normalize_scores
  bool normalized = false;
};

// d(prediction)/d(token embedding rows) dotted with the embedding rows.
// Dropout stays off, so the result is deterministic.
TokenAttribution attribute(const RegressionLM& model, const DocumentRecord& doc,
                           const TargetStats& stats);

// Divide by max |score|; all-zero attributions pass through unchanged.
void normalize_scores(TokenAttribution& attr);

// Self-contained HTML heatmap: red (-1) through white (0) to green (+1).
void export_heatmap(const DocumentRecord& doc, const TokenAttribution& attr,
                    const std::string& path);

// Mean |normalized score| per rendered region (title, metadata, abstract,
// section_<i>, caption); every byte token lands in exactly one region, while
// BOS/EOS carry no text span and are excluded, matching export_heatmap.
std::map<std::string, double> section_attribution_summary(const TokenAttribution& attr,
                                                          const DocumentRecord& doc);

std::string summary_to_csv(const std::map<std::string, double>& summary);

}  // namespace forecite
