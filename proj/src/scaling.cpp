#include "scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "evaluation.hpp"
#include "rng.hpp"
#include "targets.hpp"

namespace forecite {

namespace {

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

double sum_sq_residuals(const std::vector<double>& x1, const std::vector<double>& x2,
                        const std::vector<double>& v, const double beta[3]) {
  double ssr = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    double r = std::tanh(beta[0] + beta[1] * x1[i] + beta[2] * x2[i]) - v[i];
    ssr += r * r;
  }
  return ssr;
}

bool grid_key_less(const GridPoint& a, const GridPoint& b) {
  return std::tie(a.params_b, a.data_pct, a.split, a.metric, a.value) <
         std::tie(b.params_b, b.data_pct, b.split, b.metric, b.value);
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

double predict_scaling(const ScalingFit& fit, double params_b, double data_pct) {
  if (!(params_b > 0.0)) fail_invalid("predict_scaling: model size must be positive");
  if (!(data_pct > 0.0)) fail_invalid("predict_scaling: data percent must be positive");
  return std::tanh(fit.beta0 + fit.beta1 * std::log2(params_b) + fit.beta2 * std::log2(data_pct));
}

ScalingFit fit_scaling(std::vector<GridPoint> points) {
  if (points.size() < 4) fail_invalid("fit_scaling: need at least 4 points");
  std::set<double> ps, ds;
  for (const auto& pt : points) {
    if (!(pt.params_b > 0.0) || !(pt.data_pct > 0.0))
      fail_invalid("fit_scaling: non-positive model size or data percent");
    if (!std::isfinite(pt.value)) fail_invalid("fit_scaling: non-finite value");
    if (pt.metric != points.front().metric || pt.split != points.front().split)
      fail_invalid("fit_scaling: points mix metrics or splits");
    ps.insert(pt.params_b);
    ds.insert(pt.data_pct);
  }
  if (ps.size() < 2 || ds.size() < 2)
    fail_invalid("fit_scaling: degenerate design, need two distinct sizes and two distinct data volumes");

  std::sort(points.begin(), points.end(), grid_key_less);

  const size_t n = points.size();
  std::vector<double> x1(n), x2(n), v(n);
  double mean_v = 0.0;
  for (size_t i = 0; i < n; ++i) {
    x1[i] = std::log2(points[i].params_b);
    x2[i] = std::log2(points[i].data_pct);
    v[i] = points[i].value;
    mean_v += v[i];
  }
  mean_v /= static_cast<double>(n);

  double beta[3] = {std::atanh(clamp(mean_v, -0.999, 0.999)), 0.0, 0.0};
  double lambda = 1e-3;
  double ssr = sum_sq_residuals(x1, x2, v, beta);

  for (int iter = 0; iter < 500; ++iter) {
    // Normal equations J^T J step = J^T r with Levenberg damping on the diagonal.
    double jtj[3][3] = {};
    double jtr[3] = {};
    for (size_t i = 0; i < n; ++i) {
      double z = beta[0] + beta[1] * x1[i] + beta[2] * x2[i];
      double t = std::tanh(z);
      double w = 1.0 - t * t;  // d tanh / dz
      double r = t - v[i];
      double j[3] = {w, w * x1[i], w * x2[i]};
      for (int a = 0; a < 3; ++a) {
        jtr[a] += j[a] * r;
        for (int b = 0; b < 3; ++b) jtj[a][b] += j[a] * j[b];
      }
    }

    bool moved = false;
    while (lambda < 1e12) {
      Eigen::Matrix3d A;
      Eigen::Vector3d g;
      for (int a = 0; a < 3; ++a) {
        g(a) = jtr[a];
        for (int b = 0; b < 3; ++b) A(a, b) = jtj[a][b] + (a == b ? lambda : 0.0);
      }
      Eigen::Vector3d step = A.ldlt().solve(g);
      double trial[3] = {beta[0] - step(0), beta[1] - step(1), beta[2] - step(2)};
      double trial_ssr = sum_sq_residuals(x1, x2, v, trial);
      if (trial_ssr <= ssr) {
        beta[0] = trial[0];
        beta[1] = trial[1];
        beta[2] = trial[2];
        ssr = trial_ssr;
        lambda = std::max(lambda * 0.25, 1e-12);
        moved = step.norm() >= 1e-10;
        break;
      }
      lambda *= 4.0;
    }
    if (!moved) break;
  }

  ScalingFit fit;
  fit.metric = points.front().metric;
  fit.beta0 = beta[0];
  fit.beta1 = beta[1];
  fit.beta2 = beta[2];
  double abs_sum = 0.0;
  for (size_t i = 0; i < n; ++i)
    abs_sum += std::abs(std::tanh(beta[0] + beta[1] * x1[i] + beta[2] * x2[i]) - v[i]);
  fit.residual_mae = abs_sum / static_cast<double>(n);
  return fit;
}

std::string scaling_fit_to_json(const ScalingFit& fit) {
  nlohmann::ordered_json j;
  j["metric"] = fit.metric;
  j["beta0"] = fit.beta0;
  j["beta1"] = fit.beta1;
  j["beta2"] = fit.beta2;
  j["residual_mae"] = fit.residual_mae;
  return j.dump();
}

std::vector<GridPoint> parse_grid_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail_parse("grid csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "params_b,data_pct,split,metric,value")
    fail_parse("grid csv: bad header \"" + line + "\"");

  std::vector<GridPoint> points;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 5)
      fail_parse("grid csv: line " + std::to_string(line_no) + ": expected 5 fields");
    GridPoint pt;
    try {
      pt.params_b = std::stod(fields[0]);
      pt.data_pct = std::stod(fields[1]);
      pt.value = std::stod(fields[4]);
    } catch (const std::exception&) {
      fail_parse("grid csv: line " + std::to_string(line_no) + ": non-numeric field");
    }
    pt.split = fields[2];
    pt.metric = fields[3];
    if (pt.split != "train" && pt.split != "test")
      fail_parse("grid csv: line " + std::to_string(line_no) + ": split must be train or test");
    if (pt.metric.empty()) fail_parse("grid csv: line " + std::to_string(line_no) + ": empty metric");
    if (!(pt.params_b > 0.0) || !(pt.data_pct > 0.0) || !std::isfinite(pt.value))
      fail_parse("grid csv: line " + std::to_string(line_no) + ": out-of-range value");
    points.push_back(std::move(pt));
  }
  return points;
}

std::string grid_to_csv(std::vector<GridPoint> points) {
  std::sort(points.begin(), points.end(), grid_key_less);
  std::string out = "params_b,data_pct,split,metric,value\n";
  for (const auto& pt : points) {
    out += format_double(pt.params_b) + "," + format_double(pt.data_pct) + "," + pt.split + "," +
           pt.metric + "," + format_double(pt.value) + "\n";
  }
  return out;
}

std::vector<GridPoint> load_grid_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("grid csv: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid_csv(buf.str());
}

std::vector<GridPoint> select_grid(const std::vector<GridPoint>& points, const std::string& metric,
                                   const std::string& split) {
  std::vector<GridPoint> out;
  for (const auto& pt : points)
    if (pt.metric == metric && pt.split == split) out.push_back(pt);
  return out;
}

namespace {

struct GridCell {
  size_t config_index = 0;
  size_t fraction_index = 0;
};

std::vector<GridPoint> run_cell(const ModelConfig& config, double fraction, uint64_t cell_tag,
                                const GridRecipe& recipe, const TargetStats& stats,
                                const std::vector<DocumentRecord>& test_docs,
                                const std::vector<DocumentRecord>& train_docs) {
  // Deterministic subsample of the train split.
  std::vector<size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng(recipe.subsample_seed).fork(cell_tag).shuffle(order);
  auto n_sub = static_cast<size_t>(std::llround(fraction * static_cast<double>(train_docs.size())));
  if (n_sub < 2) fail_invalid("run_grid: fraction leaves fewer than 2 training documents");
  n_sub = std::min(n_sub, train_docs.size());

  std::vector<DocumentRecord> subset;
  subset.reserve(n_sub);
  for (size_t i = 0; i < n_sub; ++i) subset.push_back(train_docs[order[i]]);

  std::vector<std::string> texts;
  texts.reserve(subset.size());
  for (const auto& doc : subset) texts.push_back(render_markdown(doc));
  std::vector<double> targets = standardized_targets(subset, stats);

  RegressionLM model;
  if (recipe.initial_model != nullptr) {
    if (recipe.initial_model->lora)
      fail_invalid("run_grid: initial model must not carry adapters");
    model = *recipe.initial_model;
    model.config = config;
    if (model.tok_emb.rows() != config.vocab_size || model.tok_emb.cols() != config.d_model ||
        static_cast<int>(model.layers.size()) != config.n_layers)
      fail_invalid("run_grid: initial model shape does not match the cell config");
  } else {
    model = init_model(config);
  }

  PhaseConfig p1 = recipe.phase1;
  p1.seed = Rng(recipe.phase1.seed).fork(cell_tag).next_u64();
  PhaseConfig p2 = recipe.phase2;
  p2.seed = Rng(recipe.phase2.seed).fork(cell_tag).next_u64();
  train_phase1(model, texts, targets, p1);
  train_phase2(model, texts, targets, p2, recipe.lora);

  double params_b = static_cast<double>(param_count(config)) / 1e9;
  double data_pct = fraction * 100.0;
  std::vector<GridPoint> out;
  auto push = [&](const std::string& split_name, const MetricReport& report) {
    out.push_back({params_b, data_pct, split_name, "r", report.r});
    out.push_back({params_b, data_pct, split_name, "rho", report.rho});
    out.push_back({params_b, data_pct, split_name, "r2", report.r2});
    out.push_back({params_b, data_pct, split_name, "mse", report.mse});
    out.push_back({params_b, data_pct, split_name, "mae", report.mae});
  };
  push("train", evaluate(model, subset, stats));
  push("test", evaluate(model, test_docs, stats));
  return out;
}

}  // namespace

std::vector<GridPoint> run_grid(const std::vector<DocumentRecord>& docs,
                                const std::vector<ModelConfig>& configs,
                                const std::vector<double>& fractions, const GridRecipe& recipe) {
  if (configs.empty()) fail_invalid("run_grid: no model configs");
  if (fractions.empty()) fail_invalid("run_grid: no data fractions");
  for (double f : fractions)
    if (!(f > 0.0) || f > 1.0) fail_invalid("run_grid: fractions must lie in (0, 1]");
  if (docs.size() < 4) fail_invalid("run_grid: corpus too small to split");

  SplitAssignment assignment = split(docs, recipe.split_ratio, recipe.split_seed);
  std::vector<DocumentRecord> train_docs, test_docs;
  for (const auto& doc : docs) {
    if (assignment.is_train.at(doc.id))
      train_docs.push_back(doc);
    else
      test_docs.push_back(doc);
  }
  if (test_docs.size() < 2) fail_invalid("run_grid: test split has fewer than 2 documents");

  std::vector<double> train_log_rates;
  train_log_rates.reserve(train_docs.size());
  TargetStats proto;  // defaults carry delta and cutoff
  for (const auto& doc : train_docs)
    train_log_rates.push_back(doc_log_rate(doc, proto.delta, proto.cutoff));
  TargetStats stats = fit_stats(train_log_rates, proto.delta, proto.cutoff);

  std::vector<GridCell> cells;
  for (size_t ci = 0; ci < configs.size(); ++ci)
    for (size_t fi = 0; fi < fractions.size(); ++fi) cells.push_back({ci, fi});

  std::vector<std::vector<GridPoint>> results(cells.size());
  std::vector<std::string> failures(cells.size());
  std::atomic<size_t> next{0};
  int workers = std::max(1, std::min<int>(recipe.workers, static_cast<int>(cells.size())));

  auto worker = [&]() {
    while (true) {
      size_t at = next.fetch_add(1);
      if (at >= cells.size()) return;
      const GridCell& cell = cells[at];
      uint64_t tag = cell.config_index * 1000003ULL + cell.fraction_index;
      try {
        results[at] = run_cell(configs[cell.config_index], fractions[cell.fraction_index], tag,
                               recipe, stats, test_docs, train_docs);
      } catch (const Error& e) {
        failures[at] = e.what();
      } catch (const std::exception& e) {
        failures[at] = e.what();
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (size_t i = 0; i < cells.size(); ++i)
    if (!failures[i].empty()) fail_runtime("run_grid: cell failed: " + failures[i]);

  std::vector<GridPoint> grid;
  for (const auto& cell_points : results)
    grid.insert(grid.end(), cell_points.begin(), cell_points.end());
  std::sort(grid.begin(), grid.end(), grid_key_less);
  return grid;
}

GridComparison compare_checkpoints(const std::vector<GridPoint>& grid_a,
                                   const std::vector<GridPoint>& grid_b) {
  using Key = std::tuple<double, double, std::string, std::string>;
  std::map<Key, double> b_values;
  for (const auto& pt : grid_b) b_values[{pt.params_b, pt.data_pct, pt.split, pt.metric}] = pt.value;

  GridComparison cmp;
  for (const auto& pt : grid_a) {
    auto it = b_values.find({pt.params_b, pt.data_pct, pt.split, pt.metric});
    if (it == b_values.end()) continue;
    double delta = pt.value - it->second;
    cmp.deltas.push_back({pt.params_b, pt.data_pct, pt.split, pt.metric, delta});
    if (delta > 0.0)
      ++cmp.positive;
    else if (delta < 0.0)
      ++cmp.negative;
    else
      ++cmp.zero;
  }
  if (cmp.deltas.empty()) fail_invalid("compare_checkpoints: grids share no cells");
  return cmp;
}

}  // namespace forecite
