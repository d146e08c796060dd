#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "corpus.hpp"
#include "evaluation.hpp"
#include "model.hpp"
#include "targets.hpp"

using namespace forecite;

namespace {

// Direct-definition oracles, written from the formulas rather than the
// library's code path (different summation grouping, counting-based ranks).
double oracle_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / (std::sqrt(va) * std::sqrt(vb));
}

// rank_i = (#strictly smaller) + (#equal + 1) / 2, one-based with tie averaging.
std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    double less = 0.0, equal = 0.0;
    for (size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i])
        less += 1.0;
      else if (v[j] == v[i])
        equal += 1.0;
    }
    ranks[i] = less + 0.5 * (equal + 1.0);
  }
  return ranks;
}

double oracle_r2(const std::vector<double>& pred, const std::vector<double>& truth) {
  double mt = 0.0;
  for (double t : truth) mt += t;
  mt /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mt) * (truth[i] - mt);
  }
  return 1.0 - ss_res / ss_tot;
}

double oracle_mae(const std::vector<double>& pred, const std::vector<double>& truth) {
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

double oracle_mse(const std::vector<double>& pred, const std::vector<double>& truth) {
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

DocumentRecord make_doc(const std::string& id, int year, int month, long long citations) {
  DocumentRecord doc;
  doc.id = id;
  doc.title = "Study " + id;
  doc.abstract = "Findings for " + id + " cover a distinct mixture of topics.";
  doc.sections.push_back({"Methods", "The protocol for " + id + " ran end to end."});
  doc.publication_date = YearMonth{year, month};
  doc.total_citations = citations;
  return doc;
}

// Small model with a non-zero readout so predictions vary across documents.
RegressionLM readout_model(uint64_t seed) {
  ModelConfig cfg;
  cfg.d_model = 16;
  cfg.n_layers = 1;
  cfg.n_heads = 2;
  cfg.d_ff = 32;
  cfg.max_seq_len = 96;
  cfg.init_seed = seed;
  RegressionLM model = init_model(cfg);
  std::mt19937_64 gen(seed + 17);
  std::normal_distribution<double> dist(0.0, 0.5);
  for (long i = 0; i < model.head_w.size(); ++i) model.head_w[i] = dist(gen);
  model.head_b = dist(gen);
  return model;
}

TargetStats make_stats() {
  TargetStats stats;
  stats.mu = 0.4;
  stats.sigma = 1.3;
  stats.cutoff = YearMonth{2024, 12};
  return stats;
}

bool any_title_line(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line))
    if (line.size() >= 2 && line[0] == '#' && line[1] == ' ') return true;
  return false;
}

}  // namespace

TEST_CASE("pearson matches hand examples and rejects degenerate input") {
  CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson({1, 2, 3}, {-2, -4, -6}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(pearson({1, 2, 3, 4}, {10, 20, 30, 41}) > 0.999);

  CHECK_THROWS_WITH_AS(pearson({1, 1, 1}, {1, 2, 3}),
                       doctest::Contains("pearson: constant input"), Error);
  CHECK_THROWS_WITH_AS(pearson({1, 2, 3}, {5, 5, 5}),
                       doctest::Contains("correlation undefined"), Error);
  CHECK_THROWS_WITH_AS(pearson({1, 2}, {1, 2, 3}), doctest::Contains("lengths differ"), Error);
  CHECK_THROWS_WITH_AS(pearson({1}, {1}), doctest::Contains("need at least 2"), Error);
}

TEST_CASE("spearman averages tied ranks") {
  // pred ranks (1, 2.5, 2.5, 4) vs truth ranks (1, 2, 3, 4):
  // covariance 4.5, sd product sqrt(22.5).
  const double expected = 4.5 / std::sqrt(22.5);
  CHECK(expected == doctest::Approx(0.9486832980505138).epsilon(1e-15));
  CHECK(spearman({1, 2, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(expected).epsilon(1e-12));

  CHECK(spearman({10, 20, 30, 40}, {1, 4, 9, 16}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman({10, 20, 30, 40}, {-1, -4, -9, -16}) == doctest::Approx(-1.0).epsilon(1e-15));

  // All-tied input has constant ranks, which leaves the correlation undefined.
  CHECK_THROWS_WITH_AS(spearman({7, 7, 7}, {1, 2, 3}), doctest::Contains("constant input"), Error);
  CHECK_THROWS_WITH_AS(spearman({1}, {2}), doctest::Contains("need at least 2"), Error);
}

TEST_CASE("spearman is exactly invariant under strictly increasing transforms") {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    size_t n = 5 + gen() % 40;
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = unif(gen);
      y[i] = unif(gen);
    }
    if (n > 6) {  // inject ties; the transforms must preserve them
      x[1] = x[4];
      y[2] = y[5];
    }
    std::vector<double> x_cubed(n), y_exp(n);
    for (size_t i = 0; i < n; ++i) {
      x_cubed[i] = x[i] * x[i] * x[i];
      y_exp[i] = std::exp(y[i]);
    }
    // Identical rank vectors, so the results are bit-identical.
    CHECK(spearman(x, y) == spearman(x_cubed, y_exp));
  }
}

TEST_CASE("pearson is invariant under positive affine maps") {
  std::mt19937_64 gen(202);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> x(57), y(57);
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = dist(gen);
    y[i] = dist(gen) + 0.4 * x[i];
  }
  const double base = pearson(x, y);

  std::vector<double> ax(x.size()), by(y.size()), neg(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    ax[i] = 2.5 * x[i] + 3.0;
    by[i] = 0.25 * y[i] - 11.0;
    neg[i] = -x[i];
  }
  CHECK(pearson(ax, by) == doctest::Approx(base).epsilon(1e-12));
  CHECK(pearson(neg, y) == doctest::Approx(-base).epsilon(1e-12));
}

TEST_CASE("metric implementations agree with direct-definition oracles") {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> dist(0.0, 1.5);
  for (int pair = 0; pair < 100; ++pair) {
    size_t n = 2 + gen() % 999;
    std::vector<double> pred(n), truth(n);
    for (size_t i = 0; i < n; ++i) {
      pred[i] = dist(gen);
      truth[i] = dist(gen);
    }
    // Sprinkle exact ties so the rank averaging is exercised.
    for (size_t i = 3; i < n; i += 4) pred[i] = pred[gen() % i];
    for (size_t i = 5; i < n; i += 7) truth[i] = truth[gen() % i];

    CHECK(pearson(pred, truth) == doctest::Approx(oracle_pearson(pred, truth)).epsilon(1e-12));
    CHECK(spearman(pred, truth) ==
          doctest::Approx(oracle_pearson(oracle_ranks(pred), oracle_ranks(truth))).epsilon(1e-12));
    CHECK(r_squared(pred, truth) == doctest::Approx(oracle_r2(pred, truth)).epsilon(1e-12));
    CHECK(mae(pred, truth) == doctest::Approx(oracle_mae(pred, truth)).epsilon(1e-12));
    CHECK(mse(pred, truth) == doctest::Approx(oracle_mse(pred, truth)).epsilon(1e-12));
  }
}

TEST_CASE("r_squared matches hand examples") {
  CHECK(r_squared({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(r_squared({2, 2, 2}, {1, 2, 3}) == 0.0);   // predicting the mean
  CHECK(r_squared({1, -1}, {-1, 1}) == -3.0);      // worse than the mean

  CHECK_THROWS_WITH_AS(r_squared({1, 2}, {3, 3}), doctest::Contains("constant truth"), Error);
  CHECK_THROWS_WITH_AS(r_squared({1}, {1}), doctest::Contains("need at least 2"), Error);
  CHECK_THROWS_WITH_AS(r_squared({1, 2}, {1, 2, 3}), doctest::Contains("lengths differ"), Error);
}

TEST_CASE("mae and mse match hand examples") {
  CHECK(mae({1.5, 2.5, 3.5}, {1, 2, 3}) == 0.5);
  CHECK(mse({1.5, 2.5, 3.5}, {1, 2, 3}) == 0.25);
  CHECK(mae({4, 4}, {4, 4}) == 0.0);
  CHECK(mse({4, 4}, {4, 4}) == 0.0);

  // A single point is enough for the error metrics (unlike the correlations).
  CHECK(mae({1}, {3}) == 2.0);
  CHECK(mse({1}, {3}) == 4.0);

  CHECK_THROWS_WITH_AS(mae({}, {}), doctest::Contains("need at least 1"), Error);
  CHECK_THROWS_WITH_AS(mse({}, {}), doctest::Contains("need at least 1"), Error);
  CHECK_THROWS_WITH_AS(mae({1}, {1, 2}), doctest::Contains("lengths differ"), Error);
  CHECK_THROWS_WITH_AS(mse({1, 2}, {1}), doctest::Contains("lengths differ"), Error);
}

TEST_CASE("r_squared equals one minus mse over population truth variance") {
  std::mt19937_64 gen(303);
  std::normal_distribution<double> dist(0.0, 2.0);
  std::vector<double> pred(200), truth(200);
  for (size_t i = 0; i < pred.size(); ++i) {
    pred[i] = dist(gen);
    truth[i] = 0.7 * pred[i] + dist(gen);
  }
  double mt = 0.0;
  for (double t : truth) mt += t;
  mt /= static_cast<double>(truth.size());
  double var = 0.0;
  for (double t : truth) var += (t - mt) * (t - mt);
  var /= static_cast<double>(truth.size());
  CHECK(r_squared(pred, truth) ==
        doctest::Approx(1.0 - mse(pred, truth) / var).epsilon(1e-12));
}

TEST_CASE("compute_metrics bundles the five scores with the sample count") {
  std::vector<double> pred{0.1, -0.4, 1.2, 0.9, -1.1};
  std::vector<double> truth{0.0, -0.5, 1.0, 1.1, -0.9};
  MetricReport report = compute_metrics(pred, truth);
  CHECK(report.r == pearson(pred, truth));
  CHECK(report.rho == spearman(pred, truth));
  CHECK(report.r2 == r_squared(pred, truth));
  CHECK(report.mae == mae(pred, truth));
  CHECK(report.mse == mse(pred, truth));
  CHECK(report.n == 5);

  // Perfect predictions score perfectly.
  MetricReport perfect = compute_metrics(truth, truth);
  CHECK(perfect.r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(perfect.rho == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(perfect.r2 == 1.0);
  CHECK(perfect.mae == 0.0);
  CHECK(perfect.mse == 0.0);
}

TEST_CASE("metric report serializes to ordered JSON") {
  MetricReport report{0.5, 0.25, -0.125, 1.5, 2.25, 42};
  std::string text = metric_report_to_json(report);
  auto parsed = nlohmann::json::parse(text);
  CHECK(parsed.at("r").get<double>() == 0.5);
  CHECK(parsed.at("rho").get<double>() == 0.25);
  CHECK(parsed.at("r2").get<double>() == -0.125);
  CHECK(parsed.at("mae").get<double>() == 1.5);
  CHECK(parsed.at("mse").get<double>() == 2.25);
  CHECK(parsed.at("n").get<long long>() == 42);

  size_t pos_r = text.find("\"r\"");
  size_t pos_rho = text.find("\"rho\"");
  size_t pos_r2 = text.find("\"r2\"");
  size_t pos_mae = text.find("\"mae\"");
  size_t pos_mse = text.find("\"mse\"");
  size_t pos_n = text.find("\"n\"");
  REQUIRE(pos_n != std::string::npos);
  CHECK(pos_r < pos_rho);
  CHECK(pos_rho < pos_r2);
  CHECK(pos_r2 < pos_mae);
  CHECK(pos_mae < pos_mse);
  CHECK(pos_mse < pos_n);
}

TEST_CASE("golden fixture reproduces the reference metric row") {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/metric_golden.csv");
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "pred,truth");
  std::vector<double> pred, truth;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    pred.push_back(std::stod(line.substr(0, comma)));
    truth.push_back(std::stod(line.substr(comma + 1)));
  }
  REQUIRE(pred.size() == 400);

  MetricReport report = compute_metrics(pred, truth);
  CHECK(std::abs(report.r - 0.844) < 1e-4);
  CHECK(std::abs(report.rho - 0.826) < 1e-4);
  CHECK(std::abs(report.r2 - 0.706) < 1e-4);
  CHECK(std::abs(report.mse - 0.452) < 1e-4);
  CHECK(std::abs(report.mae - 0.522) < 1e-4);
  CHECK(report.n == 400);
}

TEST_CASE("predict_docs and standardized_targets compose the documented transforms") {
  RegressionLM model = readout_model(7);
  TargetStats stats = make_stats();
  std::vector<DocumentRecord> docs{make_doc("a", 2023, 1, 24), make_doc("b", 2023, 6, 3),
                                   make_doc("c", 2022, 12, 120)};

  std::vector<double> preds = predict_docs(model, docs);
  REQUIRE(preds.size() == 3);
  for (size_t i = 0; i < docs.size(); ++i)
    CHECK(preds[i] == predict_text(model, render_markdown(docs[i])));

  std::vector<double> targets = standardized_targets(docs, stats);
  REQUIRE(targets.size() == 3);
  for (size_t i = 0; i < docs.size(); ++i)
    CHECK(targets[i] == standardize(doc_log_rate(docs[i], stats.delta, stats.cutoff), stats));
}

TEST_CASE("evaluate scores the requested split side") {
  RegressionLM model = readout_model(11);
  TargetStats stats = make_stats();
  std::vector<DocumentRecord> docs;
  for (int i = 0; i < 8; ++i)
    docs.push_back(make_doc("d" + std::to_string(i), 2022 + i % 2, 1 + i, 3 + 17 * i));

  SplitAssignment split;
  split.ratio = 0.625;
  split.seed = 1;
  for (int i = 0; i < 8; ++i) {
    bool train = i < 5;
    split.is_train[docs[i].id] = train;
    (train ? split.train_ids : split.test_ids).push_back(docs[i].id);
  }

  MetricReport all = evaluate(model, docs, stats);
  CHECK(all.n == 8);
  MetricReport all_again = evaluate(model, docs, stats, &split, SplitSide::All);
  CHECK(all_again.r == all.r);
  CHECK(all_again.mse == all.mse);

  MetricReport train_side = evaluate(model, docs, stats, &split, SplitSide::Train);
  CHECK(train_side.n == 5);
  MetricReport test_side = evaluate(model, docs, stats, &split, SplitSide::Test);
  CHECK(test_side.n == 3);

  // The test side must equal a manual pass over exactly the held-out docs.
  std::vector<DocumentRecord> held(docs.begin() + 5, docs.end());
  MetricReport manual = compute_metrics(predict_docs(model, held), standardized_targets(held, stats));
  CHECK(test_side.r == manual.r);
  CHECK(test_side.rho == manual.rho);
  CHECK(test_side.mse == manual.mse);

  std::vector<DocumentRecord> with_ghost = docs;
  with_ghost.push_back(make_doc("ghost", 2023, 4, 9));
  CHECK_THROWS_WITH_AS(evaluate(model, with_ghost, stats, &split, SplitSide::Train),
                       doctest::Contains("missing from split"), Error);

  SplitAssignment all_train;
  for (const auto& doc : docs) all_train.is_train[doc.id] = true;
  CHECK_THROWS_WITH_AS(evaluate(model, docs, stats, &all_train, SplitSide::Test),
                       doctest::Contains("evaluate: empty selection"), Error);
}

TEST_CASE("temporal holdout tracks stand-alone cumulative correlations") {
  RegressionLM model = readout_model(23);
  TargetStats stats = make_stats();

  // Months: 2023-01 x3, 2023-02 x2, 2023-03 empty, 2023-04 x2, 2023-05 x3.
  std::vector<DocumentRecord> by_month{
      make_doc("d0", 2023, 1, 10), make_doc("d1", 2023, 1, 55), make_doc("d2", 2023, 1, 2),
      make_doc("d3", 2023, 2, 31), make_doc("d4", 2023, 2, 7),
      make_doc("d5", 2023, 4, 90), make_doc("d6", 2023, 4, 13),
      make_doc("d7", 2023, 5, 5),  make_doc("d8", 2023, 5, 41), make_doc("d9", 2023, 5, 23)};
  // Shuffled input order; the series must sort by month internally.
  std::vector<DocumentRecord> docs{by_month[7], by_month[0], by_month[5], by_month[3],
                                   by_month[1], by_month[8], by_month[4], by_month[2],
                                   by_month[6], by_month[9]};

  std::vector<HoldoutPoint> series = temporal_holdout(model, docs, stats);
  REQUIRE(series.size() == 5);
  CHECK(series[0].month == "2023-01");
  CHECK(series[1].month == "2023-02");
  CHECK(series[2].month == "2023-03");
  CHECK(series[3].month == "2023-04");
  CHECK(series[4].month == "2023-05");
  CHECK(series[0].n == 3);
  CHECK(series[1].n == 5);
  CHECK(series[2].n == 5);
  CHECK(series[3].n == 7);
  CHECK(series[4].n == 10);

  // First point equals the stand-alone correlation over the first cohort.
  std::vector<DocumentRecord> january(by_month.begin(), by_month.begin() + 3);
  double first = pearson(predict_docs(model, january), standardized_targets(january, stats));
  CHECK(series[0].cumulative_r == first);

  // An empty month repeats the previous cumulative value.
  CHECK(series[2].cumulative_r == series[1].cumulative_r);

  // Last point covers every document.
  double last = pearson(predict_docs(model, by_month), standardized_targets(by_month, stats));
  CHECK(series[4].cumulative_r == last);
  CHECK(series[4].cumulative_r ==
        doctest::Approx(evaluate(model, docs, stats).r).epsilon(1e-12));

  // Regeneration is byte-identical.
  CHECK(holdout_to_csv(temporal_holdout(model, docs, stats)) == holdout_to_csv(series));
}

TEST_CASE("temporal holdout skips undersized cohorts and validates input") {
  RegressionLM model = readout_model(29);
  TargetStats stats = make_stats();

  std::vector<DocumentRecord> docs{make_doc("solo", 2023, 1, 40), make_doc("pair", 2023, 2, 4)};
  std::vector<HoldoutPoint> series = temporal_holdout(model, docs, stats);
  REQUIRE(series.size() == 1);  // one document is not enough for a correlation
  CHECK(series[0].month == "2023-02");
  CHECK(series[0].n == 2);

  CHECK_THROWS_WITH_AS(temporal_holdout(model, {}, stats),
                       doctest::Contains("empty holdout"), Error);
  std::vector<DocumentRecord> undated{make_doc("u0", 2023, 1, 4), make_doc("u1", 2023, 1, 9)};
  undated[1].publication_date.reset();
  CHECK_THROWS_WITH_AS(temporal_holdout(model, undated, stats),
                       doctest::Contains("has no publication date"), Error);
}

TEST_CASE("holdout series serializes month by month") {
  std::vector<HoldoutPoint> series{
      {"2023-01", 0.5, 3}, {"2023-02", -0.25, 5}, {"2023-03", 1.0 / 3.0, 7}};
  std::string csv = holdout_to_csv(series);

  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "month,cumulative_r");
  REQUIRE(std::getline(in, line));
  CHECK(line == "2023-01,0.5");
  REQUIRE(std::getline(in, line));
  CHECK(line == "2023-02,-0.25");
  REQUIRE(std::getline(in, line));
  // Full round-trip precision for non-terminating binary fractions.
  size_t comma = line.find(',');
  CHECK(line.substr(0, comma) == "2023-03");
  CHECK(std::stod(line.substr(comma + 1)) == 1.0 / 3.0);
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("ablation empties exactly the targeted field") {
  std::vector<DocumentRecord> docs{make_doc("a1", 2023, 3, 12), make_doc("a2", 2023, 7, 3)};
  docs[0].journal = "Journal of Tests";
  docs[0].captions.push_back("Figure 1: layout.");
  docs[1].sections.push_back({"Results", "Numbers went up."});

  std::vector<DocumentRecord> no_title = ablate(docs, AblationField::Title);
  REQUIRE(no_title.size() == docs.size());
  for (size_t i = 0; i < docs.size(); ++i) {
    CHECK(no_title[i].title.empty());
    CHECK(no_title[i].id == docs[i].id);
    CHECK(no_title[i].abstract == docs[i].abstract);
    CHECK(no_title[i].journal == docs[i].journal);
    CHECK(no_title[i].publication_date == docs[i].publication_date);
    CHECK(no_title[i].total_citations == docs[i].total_citations);
    CHECK(no_title[i].sections.size() == docs[i].sections.size());
    CHECK(no_title[i].captions == docs[i].captions);

    std::string rendered = render_markdown(no_title[i]);
    CHECK_FALSE(any_title_line(rendered));
    CHECK(rendered.find("## Abstract") != std::string::npos);
  }

  std::vector<DocumentRecord> no_abstract = ablate(docs, AblationField::Abstract);
  for (size_t i = 0; i < docs.size(); ++i) {
    CHECK(no_abstract[i].abstract.empty());
    CHECK(no_abstract[i].title == docs[i].title);
    std::string rendered = render_markdown(no_abstract[i]);
    CHECK(rendered.find("## Abstract") == std::string::npos);
    CHECK(rendered.rfind("# ", 0) == 0);  // title survives
  }

  // Idempotent, and the input corpus is untouched.
  std::vector<DocumentRecord> twice = ablate(no_abstract, AblationField::Abstract);
  for (size_t i = 0; i < docs.size(); ++i)
    CHECK(render_markdown(twice[i]) == render_markdown(no_abstract[i]));
  CHECK_FALSE(docs[0].title.empty());
  CHECK_FALSE(docs[0].abstract.empty());
}
