#include "targets.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "common.hpp"

namespace forecite {

int months_elapsed(const YearMonth& pub, const YearMonth& cutoff) {
  if (cutoff < pub) {
    fail_invalid("publication date " + format_ym(pub) + " is after cutoff " + format_ym(cutoff));
  }
  return std::max(1, cutoff.index() - pub.index());
}

double monthly_rate(long long citations, int months) {
  if (citations < 0) fail_invalid("citations must be >= 0");
  if (months < 1) fail_invalid("months must be >= 1");
  return static_cast<double>(citations) / months;
}

double log_rate(double rate, double delta) {
  if (rate < 0) fail_invalid("rate must be >= 0");
  if (delta <= 0) fail_invalid("delta must be > 0");
  return std::log(rate + delta);
}

TargetStats fit_stats(const std::vector<double>& train_log_rates, double delta,
                      const YearMonth& cutoff) {
  if (train_log_rates.size() < 2) fail_invalid("fit_stats requires at least 2 values");
  if (delta <= 0) fail_invalid("delta must be > 0");
  double mean = 0.0;
  for (double v : train_log_rates) mean += v;
  mean /= train_log_rates.size();
  double var = 0.0;
  for (double v : train_log_rates) var += (v - mean) * (v - mean);
  var /= train_log_rates.size();
  if (var <= 0.0) fail_invalid("degenerate target distribution: all train log rates are equal");
  return TargetStats{mean, std::sqrt(var), delta, cutoff};
}

double standardize(double value, const TargetStats& stats) { return (value - stats.mu) / stats.sigma; }

double destandardize(double value, const TargetStats& stats) { return value * stats.sigma + stats.mu; }

double doc_log_rate(const DocumentRecord& doc, double delta, const YearMonth& cutoff) {
  if (!doc.publication_date) fail_invalid("document \"" + doc.id + "\" has no publication date");
  int months = months_elapsed(*doc.publication_date, cutoff);
  return log_rate(monthly_rate(doc.total_citations, months), delta);
}

std::string target_stats_to_json(const TargetStats& stats) {
  nlohmann::json obj;
  obj["mu"] = stats.mu;
  obj["sigma"] = stats.sigma;
  obj["delta"] = stats.delta;
  obj["cutoff"] = format_ym(stats.cutoff);
  return obj.dump();
}

TargetStats target_stats_from_json(const std::string& text) {
  nlohmann::json obj = nlohmann::json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) fail_parse("malformed target stats JSON");
  for (const char* key : {"mu", "sigma", "delta", "cutoff"}) {
    if (!obj.contains(key)) fail_parse(std::string("target stats JSON missing \"") + key + "\"");
  }
  TargetStats stats;
  stats.mu = obj["mu"].get<double>();
  stats.sigma = obj["sigma"].get<double>();
  stats.delta = obj["delta"].get<double>();
  stats.cutoff = parse_ym(obj["cutoff"].get<std::string>());
  if (stats.sigma <= 0) fail_parse("target stats sigma must be > 0");
  if (stats.delta <= 0) fail_parse("target stats delta must be > 0");
  return stats;
}

}  // namespace forecite
