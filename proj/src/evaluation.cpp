#include "evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common.hpp"

namespace forecite {

namespace {

void check_pair(const std::vector<double>& pred, const std::vector<double>& truth, size_t min_n,
                const char* op) {
  if (pred.size() != truth.size())
    fail_invalid(std::string(op) + ": prediction and truth lengths differ");
  if (pred.size() < min_n)
    fail_invalid(std::string(op) + ": need at least " + std::to_string(min_n) + " points");
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Average ranks, 1-based; tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double pearson(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_pair(pred, truth, 2, "pearson");
  double mp = mean_of(pred);
  double mt = mean_of(truth);
  double cov = 0.0, vp = 0.0, vt = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    double dp = pred[i] - mp;
    double dt = truth[i] - mt;
    cov += dp * dt;
    vp += dp * dp;
    vt += dt * dt;
  }
  if (vp == 0.0 || vt == 0.0) fail_invalid("pearson: constant input, correlation undefined");
  return cov / std::sqrt(vp * vt);
}

double spearman(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_pair(pred, truth, 2, "spearman");
  return pearson(average_ranks(pred), average_ranks(truth));
}

double r_squared(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_pair(pred, truth, 2, "r_squared");
  double mt = mean_of(truth);
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mt) * (truth[i] - mt);
  }
  if (ss_tot == 0.0) fail_invalid("r_squared: constant truth, undefined");
  return 1.0 - ss_res / ss_tot;
}

double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_pair(pred, truth, 1, "mae");
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

double mse(const std::vector<double>& pred, const std::vector<double>& truth) {
  check_pair(pred, truth, 1, "mse");
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

MetricReport compute_metrics(const std::vector<double>& pred, const std::vector<double>& truth) {
  MetricReport report;
  report.r = pearson(pred, truth);
  report.rho = spearman(pred, truth);
  report.r2 = r_squared(pred, truth);
  report.mae = mae(pred, truth);
  report.mse = mse(pred, truth);
  report.n = static_cast<long long>(pred.size());
  return report;
}

std::string metric_report_to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["r"] = report.r;
  j["rho"] = report.rho;
  j["r2"] = report.r2;
  j["mae"] = report.mae;
  j["mse"] = report.mse;
  j["n"] = report.n;
  return j.dump();
}

std::vector<double> predict_docs(const RegressionLM& model, const std::vector<DocumentRecord>& docs) {
  std::vector<double> preds;
  preds.reserve(docs.size());
  for (const auto& doc : docs) preds.push_back(predict_text(model, render_markdown(doc)));
  return preds;
}

std::vector<double> standardized_targets(const std::vector<DocumentRecord>& docs,
                                         const TargetStats& stats) {
  std::vector<double> targets;
  targets.reserve(docs.size());
  for (const auto& doc : docs)
    targets.push_back(standardize(doc_log_rate(doc, stats.delta, stats.cutoff), stats));
  return targets;
}

MetricReport evaluate(const RegressionLM& model, const std::vector<DocumentRecord>& docs,
                      const TargetStats& stats, const SplitAssignment* split, SplitSide side) {
  std::vector<DocumentRecord> selected;
  if (split == nullptr || side == SplitSide::All) {
    selected = docs;
  } else {
    for (const auto& doc : docs) {
      auto it = split->is_train.find(doc.id);
      if (it == split->is_train.end()) fail_invalid("evaluate: document " + doc.id + " missing from split");
      if (it->second == (side == SplitSide::Train)) selected.push_back(doc);
    }
  }
  if (selected.empty()) fail_invalid("evaluate: empty selection");
  return compute_metrics(predict_docs(model, selected), standardized_targets(selected, stats));
}

std::vector<HoldoutPoint> temporal_holdout(const RegressionLM& model,
                                           const std::vector<DocumentRecord>& docs,
                                           const TargetStats& stats) {
  if (docs.empty()) fail_invalid("temporal_holdout: empty holdout set");
  for (const auto& doc : docs)
    if (!doc.publication_date)
      fail_invalid("temporal_holdout: document " + doc.id + " has no publication date");

  std::vector<size_t> order(docs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return docs[a].publication_date->index() < docs[b].publication_date->index();
  });

  std::vector<double> preds, truths;
  preds.reserve(docs.size());
  truths.reserve(docs.size());
  std::vector<int> month_index;
  for (size_t idx : order) {
    const auto& doc = docs[idx];
    preds.push_back(predict_text(model, render_markdown(doc)));
    truths.push_back(standardize(doc_log_rate(doc, stats.delta, stats.cutoff), stats));
    month_index.push_back(doc.publication_date->index());
  }

  std::vector<HoldoutPoint> series;
  size_t covered = 0;
  for (int m = month_index.front(); m <= month_index.back(); ++m) {
    while (covered < month_index.size() && month_index[covered] <= m) ++covered;
    if (covered < 2) continue;
    std::vector<double> p(preds.begin(), preds.begin() + static_cast<long>(covered));
    std::vector<double> t(truths.begin(), truths.begin() + static_cast<long>(covered));
    double r;
    try {
      r = pearson(p, t);
    } catch (const Error&) {
      continue;  // degenerate cumulative cohort
    }
    YearMonth ym{m / 12, m % 12 + 1};
    series.push_back({format_ym(ym), r, static_cast<long long>(covered)});
  }
  return series;
}

std::string holdout_to_csv(const std::vector<HoldoutPoint>& series) {
  std::ostringstream out;
  out << "month,cumulative_r\n";
  out.precision(17);
  for (const auto& point : series) out << point.month << "," << point.cumulative_r << "\n";
  return out.str();
}

std::vector<DocumentRecord> ablate(const std::vector<DocumentRecord>& docs, AblationField field) {
  std::vector<DocumentRecord> out = docs;
  for (auto& doc : out) {
    if (field == AblationField::Title)
      doc.title.clear();
    else
      doc.abstract.clear();
  }
  return out;
}

}  // namespace forecite
