#include "forecite.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "corpus.hpp"
#include "evaluation.hpp"
#include "model.hpp"
#include "saliency.hpp"
#include "scaling.hpp"
#include "sha1.hpp"
#include "targets.hpp"
#include "training.hpp"

using json = nlohmann::json;

struct fc_corpus {
  std::vector<forecite::DocumentRecord> docs;
};

struct fc_model {
  forecite::RegressionLM model;
  forecite::TargetStats stats;
};

namespace {

thread_local std::string g_last_error;

fc_status status_of(forecite::ErrorKind kind) {
  switch (kind) {
    case forecite::ErrorKind::InvalidArgument: return FC_ERR_INVALID_ARGUMENT;
    case forecite::ErrorKind::Io: return FC_ERR_IO;
    case forecite::ErrorKind::Parse: return FC_ERR_PARSE;
    case forecite::ErrorKind::Runtime: return FC_ERR_RUNTIME;
  }
  return FC_ERR_RUNTIME;
}

template <class Fn>
fc_status guarded(Fn&& fn) {
  try {
    fn();
    return FC_OK;
  } catch (const forecite::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FC_ERR_RUNTIME;
  }
}

fc_status invalid(const char* msg) {
  g_last_error = msg;
  return FC_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void set_out_string(char** slot, const std::string& value) {
  if (slot == nullptr) return;
  *slot = dup_string(value);
  if (*slot == nullptr) forecite::fail_runtime("out of memory");
}

json parse_json_arg(const char* text, const char* what) {
  if (text == nullptr) return json::object();
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) forecite::fail_parse(std::string(what) + ": invalid JSON");
  if (!j.is_object()) forecite::fail_parse(std::string(what) + ": expected a JSON object");
  return j;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* name : allowed)
      if (key == name) ok = true;
    if (!ok) forecite::fail_invalid(std::string(what) + ": unknown key \"" + key + "\"");
  }
}

forecite::SignalSpec parse_signal_spec(const json& j) {
  check_keys(j,
             {"region", "kind", "slots", "marker", "base", "slope", "sigma_noise", "p_lo", "p_hi",
              "date_lo", "date_hi", "cutoff", "delta"},
             "signal spec");
  forecite::SignalSpec spec;
  if (j.contains("region")) {
    std::string r = j["region"].get<std::string>();
    if (r == "title")
      spec.region = forecite::SignalSpec::Region::Title;
    else if (r == "abstract")
      spec.region = forecite::SignalSpec::Region::Abstract;
    else if (r == "body")
      spec.region = forecite::SignalSpec::Region::Body;
    else
      forecite::fail_invalid("signal spec: region must be title, abstract, or body");
  }
  if (j.contains("kind")) {
    std::string k = j["kind"].get<std::string>();
    if (k == "count")
      spec.kind = forecite::SignalSpec::Kind::Count;
    else if (k == "order")
      spec.kind = forecite::SignalSpec::Kind::Order;
    else
      forecite::fail_invalid("signal spec: kind must be count or order");
  }
  if (j.contains("slots")) spec.slots = j["slots"].get<int>();
  if (j.contains("marker")) spec.marker = j["marker"].get<std::string>();
  if (j.contains("base")) spec.base = j["base"].get<double>();
  if (j.contains("slope")) spec.slope = j["slope"].get<double>();
  if (j.contains("sigma_noise")) spec.sigma_noise = j["sigma_noise"].get<double>();
  if (j.contains("p_lo")) spec.p_lo = j["p_lo"].get<double>();
  if (j.contains("p_hi")) spec.p_hi = j["p_hi"].get<double>();
  if (j.contains("date_lo")) spec.date_lo = forecite::parse_ym(j["date_lo"].get<std::string>());
  if (j.contains("date_hi")) spec.date_hi = forecite::parse_ym(j["date_hi"].get<std::string>());
  if (j.contains("cutoff")) spec.cutoff = forecite::parse_ym(j["cutoff"].get<std::string>());
  if (j.contains("delta")) spec.delta = j["delta"].get<double>();
  return spec;
}

forecite::FilterPolicy parse_filter_policy(const json& j) {
  check_keys(j, {"min_chars", "max_chars", "require_abstract", "require_body", "min_ascii_ratio"},
             "filter policy");
  forecite::FilterPolicy policy;
  if (j.contains("min_chars")) policy.min_chars = j["min_chars"].get<int>();
  if (j.contains("max_chars")) policy.max_chars = j["max_chars"].get<int>();
  if (j.contains("require_abstract")) policy.require_abstract = j["require_abstract"].get<bool>();
  if (j.contains("require_body")) policy.require_body = j["require_body"].get<bool>();
  if (j.contains("min_ascii_ratio")) policy.min_ascii_ratio = j["min_ascii_ratio"].get<double>();
  return policy;
}

forecite::ModelConfig parse_model_config(const json& j) {
  check_keys(j, {"vocab_size", "d_model", "n_layers", "n_heads", "d_ff", "max_seq_len", "init_seed"},
             "model config");
  forecite::ModelConfig config;
  if (j.contains("vocab_size")) config.vocab_size = j["vocab_size"].get<int>();
  if (j.contains("d_model")) config.d_model = j["d_model"].get<int>();
  if (j.contains("n_layers")) config.n_layers = j["n_layers"].get<int>();
  if (j.contains("n_heads")) config.n_heads = j["n_heads"].get<int>();
  if (j.contains("d_ff")) config.d_ff = j["d_ff"].get<int>();
  if (j.contains("max_seq_len")) config.max_seq_len = j["max_seq_len"].get<int>();
  if (j.contains("init_seed")) config.init_seed = j["init_seed"].get<uint64_t>();
  return config;
}

forecite::PhaseConfig parse_phase_config(const json& j, forecite::PhaseConfig defaults,
                                         const char* what) {
  check_keys(j, {"learning_rate", "weight_decay", "grad_accum_steps", "batch_size", "epochs", "seed"},
             what);
  forecite::PhaseConfig cfg = defaults;
  if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("weight_decay")) cfg.weight_decay = j["weight_decay"].get<double>();
  if (j.contains("grad_accum_steps")) cfg.grad_accum_steps = j["grad_accum_steps"].get<int>();
  if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
  if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
  return cfg;
}

forecite::LoraConfig parse_lora_config(const json& j) {
  check_keys(j, {"rank", "alpha", "dropout"}, "lora config");
  forecite::LoraConfig cfg;
  if (j.contains("rank")) cfg.rank = j["rank"].get<int>();
  if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
  if (j.contains("dropout")) cfg.dropout = j["dropout"].get<double>();
  return cfg;
}

struct SplitSpec {
  double ratio = 0.9;
  uint64_t seed = 0;
};

SplitSpec parse_split_spec(const json& j) {
  check_keys(j, {"ratio", "seed"}, "split");
  SplitSpec spec;
  if (j.contains("ratio")) spec.ratio = j["ratio"].get<double>();
  if (j.contains("seed")) spec.seed = j["seed"].get<uint64_t>();
  return spec;
}

json metrics_json_of(const forecite::MetricReport& report) {
  return json::parse(forecite::metric_report_to_json(report));
}

}  // namespace

extern "C" {

const char* fc_version(void) { return "1.0.0"; }

const char* fc_last_error(void) { return g_last_error.c_str(); }

void fc_string_free(char* s) { std::free(s); }

fc_status fc_corpus_open(const char* jsonl_path, fc_corpus** out) {
  if (jsonl_path == nullptr || out == nullptr) return invalid("fc_corpus_open: NULL argument");
  return guarded([&] { *out = new fc_corpus{forecite::ingest(jsonl_path)}; });
}

fc_status fc_corpus_synthesize(int n_docs, uint64_t seed, const char* spec_json, fc_corpus** out) {
  if (out == nullptr) return invalid("fc_corpus_synthesize: NULL output");
  return guarded([&] {
    forecite::SignalSpec spec = parse_signal_spec(parse_json_arg(spec_json, "signal spec"));
    *out = new fc_corpus{forecite::records_of(forecite::synthesize(n_docs, spec, seed))};
  });
}

fc_status fc_corpus_save(const fc_corpus* corpus, const char* jsonl_path) {
  if (corpus == nullptr || jsonl_path == nullptr) return invalid("fc_corpus_save: NULL argument");
  return guarded([&] { forecite::write_jsonl(corpus->docs, jsonl_path); });
}

fc_status fc_corpus_filter(fc_corpus* corpus, const char* policy_json, char** report_json) {
  if (corpus == nullptr) return invalid("fc_corpus_filter: NULL corpus");
  return guarded([&] {
    forecite::FilterPolicy policy = parse_filter_policy(parse_json_arg(policy_json, "filter policy"));
    auto [kept, rejected] = forecite::filter_corpus(corpus->docs, policy);
    corpus->docs = std::move(kept);
    json report = json::array();
    for (const auto& r : rejected) report.push_back({{"id", r.id}, {"reason", r.reason}});
    set_out_string(report_json, report.dump());
  });
}

fc_status fc_corpus_dedup(fc_corpus* corpus) {
  if (corpus == nullptr) return invalid("fc_corpus_dedup: NULL corpus");
  return guarded([&] { corpus->docs = forecite::dedup(corpus->docs); });
}

fc_status fc_corpus_ablate(fc_corpus* corpus, const char* field) {
  if (corpus == nullptr || field == nullptr) return invalid("fc_corpus_ablate: NULL argument");
  return guarded([&] {
    std::string name = field;
    forecite::AblationField which;
    if (name == "title")
      which = forecite::AblationField::Title;
    else if (name == "abstract")
      which = forecite::AblationField::Abstract;
    else
      forecite::fail_invalid("fc_corpus_ablate: field must be title or abstract");
    corpus->docs = forecite::ablate(corpus->docs, which);
  });
}

fc_status fc_corpus_temporal_split(const fc_corpus* corpus, const char* cutoff_month,
                                   fc_corpus** train_out, fc_corpus** holdout_out) {
  if (corpus == nullptr || cutoff_month == nullptr || train_out == nullptr || holdout_out == nullptr)
    return invalid("fc_corpus_temporal_split: NULL argument");
  return guarded([&] {
    forecite::YearMonth cutoff = forecite::parse_ym(cutoff_month);
    auto [train_docs, holdout_docs] = forecite::temporal_split(corpus->docs, cutoff);
    *train_out = new fc_corpus{std::move(train_docs)};
    *holdout_out = new fc_corpus{std::move(holdout_docs)};
  });
}

fc_status fc_corpus_size(const fc_corpus* corpus, size_t* out) {
  if (corpus == nullptr || out == nullptr) return invalid("fc_corpus_size: NULL argument");
  *out = corpus->docs.size();
  return FC_OK;
}

fc_status fc_corpus_doc_markdown(const fc_corpus* corpus, size_t index, char** out) {
  if (corpus == nullptr || out == nullptr) return invalid("fc_corpus_doc_markdown: NULL argument");
  return guarded([&] {
    if (index >= corpus->docs.size()) forecite::fail_invalid("fc_corpus_doc_markdown: index out of range");
    set_out_string(out, forecite::render_markdown(corpus->docs[index]));
  });
}

fc_status fc_corpus_doc_json(const fc_corpus* corpus, size_t index, char** out) {
  if (corpus == nullptr || out == nullptr) return invalid("fc_corpus_doc_json: NULL argument");
  return guarded([&] {
    if (index >= corpus->docs.size()) forecite::fail_invalid("fc_corpus_doc_json: index out of range");
    set_out_string(out, forecite::doc_to_json(corpus->docs[index]));
  });
}

void fc_corpus_free(fc_corpus* corpus) { delete corpus; }

fc_status fc_train(const fc_corpus* corpus, const char* run_config_json,
                   const char* checkpoint_path, char** report_json) {
  if (corpus == nullptr || checkpoint_path == nullptr) return invalid("fc_train: NULL argument");
  return guarded([&] {
    json j = parse_json_arg(run_config_json, "run config");
    check_keys(j,
               {"model", "split", "target", "phase1", "phase2", "pretrain", "lora", "mode",
                "init_checkpoint"},
               "run config");

    std::string mode = j.value("mode", "two_phase");
    if (mode != "two_phase" && mode != "phase1_only" && mode != "pretrain")
      forecite::fail_invalid("run config: mode must be two_phase, phase1_only, or pretrain");

    SplitSpec split_spec = parse_split_spec(j.contains("split") ? j["split"] : json::object());
    double delta = forecite::TargetStats{}.delta;
    forecite::YearMonth cutoff = forecite::TargetStats{}.cutoff;
    if (j.contains("target")) {
      check_keys(j["target"], {"delta", "cutoff"}, "target");
      if (j["target"].contains("delta")) delta = j["target"]["delta"].get<double>();
      if (j["target"].contains("cutoff"))
        cutoff = forecite::parse_ym(j["target"]["cutoff"].get<std::string>());
    }

    if (corpus->docs.empty()) forecite::fail_invalid("fc_train: empty corpus");
    forecite::SplitAssignment assignment =
        forecite::split(corpus->docs, split_spec.ratio, split_spec.seed);
    std::vector<forecite::DocumentRecord> train_docs, test_docs;
    for (const auto& doc : corpus->docs) {
      if (assignment.is_train.at(doc.id))
        train_docs.push_back(doc);
      else
        test_docs.push_back(doc);
    }

    forecite::RegressionLM model;
    if (j.contains("init_checkpoint")) {
      forecite::Checkpoint ckpt =
          forecite::load_checkpoint(j["init_checkpoint"].get<std::string>());
      if (ckpt.model.lora)
        forecite::fail_invalid("fc_train: init checkpoint already carries adapters");
      model = std::move(ckpt.model);
      if (j.contains("model")) {
        forecite::ModelConfig requested = parse_model_config(j["model"]);
        requested.init_seed = model.config.init_seed;
        if (requested.vocab_size != model.config.vocab_size ||
            requested.d_model != model.config.d_model ||
            requested.n_layers != model.config.n_layers ||
            requested.n_heads != model.config.n_heads || requested.d_ff != model.config.d_ff ||
            requested.max_seq_len != model.config.max_seq_len)
          forecite::fail_invalid("fc_train: model config conflicts with init_checkpoint");
      }
    } else {
      model = forecite::init_model(parse_model_config(j.contains("model") ? j["model"] : json::object()));
    }

    forecite::TargetStats stats;
    stats.delta = delta;
    stats.cutoff = cutoff;
    if (mode != "pretrain") {
      std::vector<double> log_rates;
      log_rates.reserve(train_docs.size());
      for (const auto& doc : train_docs)
        log_rates.push_back(forecite::doc_log_rate(doc, delta, cutoff));
      stats = forecite::fit_stats(log_rates, delta, cutoff);
    }

    std::vector<std::string> texts;
    texts.reserve(train_docs.size());
    for (const auto& doc : train_docs) texts.push_back(forecite::render_markdown(doc));

    json report;
    if (mode == "pretrain") {
      forecite::PhaseConfig pcfg = parse_phase_config(
          j.contains("pretrain") ? j["pretrain"] : json::object(), forecite::PhaseConfig{}, "pretrain");
      forecite::TrainResult lm = forecite::pretrain_lm(model, texts, pcfg);
      report["lm_loss"] = lm.loss_trace;
    } else {
      std::vector<double> targets;
      targets.reserve(train_docs.size());
      for (const auto& doc : train_docs)
        targets.push_back(
            forecite::standardize(forecite::doc_log_rate(doc, delta, cutoff), stats));

      forecite::PhaseConfig p1 = parse_phase_config(
          j.contains("phase1") ? j["phase1"] : json::object(), forecite::PhaseConfig{}, "phase1");
      forecite::TrainResult r1 = forecite::train_phase1(model, texts, targets, p1);
      report["phase1_loss"] = r1.loss_trace;

      if (mode == "two_phase") {
        forecite::PhaseConfig p2 =
            parse_phase_config(j.contains("phase2") ? j["phase2"] : json::object(),
                               forecite::finetune_defaults(), "phase2");
        forecite::LoraConfig lora =
            parse_lora_config(j.contains("lora") ? j["lora"] : json::object());
        forecite::TrainResult r2 = forecite::train_phase2(model, texts, targets, p2, lora);
        report["phase2_loss"] = r2.loss_trace;
      }

      report["train_metrics"] = metrics_json_of(forecite::evaluate(model, train_docs, stats));
      if (test_docs.size() >= 2)
        report["test_metrics"] = metrics_json_of(forecite::evaluate(model, test_docs, stats));
    }

    forecite::save_checkpoint(checkpoint_path, model, stats);
    set_out_string(report_json, report.dump());
  });
}

fc_status fc_model_open(const char* checkpoint_path, fc_model** out) {
  if (checkpoint_path == nullptr || out == nullptr) return invalid("fc_model_open: NULL argument");
  return guarded([&] {
    forecite::Checkpoint ckpt = forecite::load_checkpoint(checkpoint_path);
    *out = new fc_model{std::move(ckpt.model), ckpt.stats};
  });
}

fc_status fc_model_save(const fc_model* model, const char* checkpoint_path) {
  if (model == nullptr || checkpoint_path == nullptr) return invalid("fc_model_save: NULL argument");
  return guarded([&] {
    auto& mutable_model = const_cast<fc_model*>(model)->model;  // refs only, layout untouched
    forecite::save_checkpoint(checkpoint_path, mutable_model, model->stats);
  });
}

fc_status fc_model_predict_markdown(const fc_model* model, const char* text, double* standardized,
                                    double* log_rate) {
  if (model == nullptr || text == nullptr) return invalid("fc_model_predict_markdown: NULL argument");
  return guarded([&] {
    double pred = forecite::predict_text(model->model, text);
    if (standardized != nullptr) *standardized = pred;
    if (log_rate != nullptr) *log_rate = forecite::destandardize(pred, model->stats);
  });
}

fc_status fc_model_evaluate(const fc_model* model, const fc_corpus* corpus,
                            const char* selection_json, char** metrics_json) {
  if (model == nullptr || corpus == nullptr) return invalid("fc_model_evaluate: NULL argument");
  return guarded([&] {
    json j = parse_json_arg(selection_json, "selection");
    check_keys(j, {"side", "ratio", "seed"}, "selection");
    std::string side = j.value("side", "all");
    forecite::MetricReport report;
    if (side == "all") {
      report = forecite::evaluate(model->model, corpus->docs, model->stats);
    } else if (side == "train" || side == "test") {
      json split_part = j;
      split_part.erase("side");
      SplitSpec spec = parse_split_spec(split_part);
      forecite::SplitAssignment assignment =
          forecite::split(corpus->docs, spec.ratio, spec.seed);
      report = forecite::evaluate(model->model, corpus->docs, model->stats, &assignment,
                                  side == "train" ? forecite::SplitSide::Train
                                                  : forecite::SplitSide::Test);
    } else {
      forecite::fail_invalid("selection: side must be all, train, or test");
    }
    set_out_string(metrics_json, forecite::metric_report_to_json(report));
  });
}

fc_status fc_model_temporal_holdout(const fc_model* model, const fc_corpus* corpus, char** csv_out) {
  if (model == nullptr || corpus == nullptr || csv_out == nullptr)
    return invalid("fc_model_temporal_holdout: NULL argument");
  return guarded([&] {
    auto series = forecite::temporal_holdout(model->model, corpus->docs, model->stats);
    set_out_string(csv_out, forecite::holdout_to_csv(series));
  });
}

fc_status fc_model_saliency(const fc_model* model, const fc_corpus* corpus, size_t index,
                            const char* html_path, char** summary_csv) {
  if (model == nullptr || corpus == nullptr) return invalid("fc_model_saliency: NULL argument");
  return guarded([&] {
    if (index >= corpus->docs.size()) forecite::fail_invalid("fc_model_saliency: index out of range");
    const forecite::DocumentRecord& doc = corpus->docs[index];
    forecite::TokenAttribution attr = forecite::attribute(model->model, doc, model->stats);
    forecite::normalize_scores(attr);
    if (html_path != nullptr) forecite::export_heatmap(doc, attr, html_path);
    if (summary_csv != nullptr)
      set_out_string(summary_csv,
                     forecite::summary_to_csv(forecite::section_attribution_summary(attr, doc)));
  });
}

void fc_model_free(fc_model* model) { delete model; }

fc_status fc_run_grid(const fc_corpus* corpus, const char* grid_config_json,
                      const char* initial_checkpoint, char** grid_csv) {
  if (corpus == nullptr || grid_csv == nullptr) return invalid("fc_run_grid: NULL argument");
  return guarded([&] {
    json j = parse_json_arg(grid_config_json, "grid config");
    check_keys(j, {"configs", "fractions", "phase1", "phase2", "lora", "split", "subsample_seed",
                   "workers"},
               "grid config");
    if (!j.contains("configs") || !j["configs"].is_array() || j["configs"].empty())
      forecite::fail_invalid("grid config: configs must be a non-empty array");
    if (!j.contains("fractions") || !j["fractions"].is_array() || j["fractions"].empty())
      forecite::fail_invalid("grid config: fractions must be a non-empty array");

    std::vector<forecite::ModelConfig> configs;
    for (const auto& entry : j["configs"]) configs.push_back(parse_model_config(entry));
    std::vector<double> fractions;
    for (const auto& entry : j["fractions"]) fractions.push_back(entry.get<double>());

    forecite::GridRecipe recipe;
    recipe.phase1 = parse_phase_config(j.contains("phase1") ? j["phase1"] : json::object(),
                                       forecite::PhaseConfig{}, "phase1");
    recipe.phase2 = parse_phase_config(j.contains("phase2") ? j["phase2"] : json::object(),
                                       forecite::finetune_defaults(), "phase2");
    recipe.lora = parse_lora_config(j.contains("lora") ? j["lora"] : json::object());
    SplitSpec split_spec = parse_split_spec(j.contains("split") ? j["split"] : json::object());
    recipe.split_ratio = split_spec.ratio;
    recipe.split_seed = split_spec.seed;
    if (j.contains("subsample_seed")) recipe.subsample_seed = j["subsample_seed"].get<uint64_t>();
    if (j.contains("workers")) recipe.workers = j["workers"].get<int>();

    forecite::RegressionLM initial;
    if (initial_checkpoint != nullptr) {
      forecite::Checkpoint ckpt = forecite::load_checkpoint(initial_checkpoint);
      initial = std::move(ckpt.model);
      recipe.initial_model = &initial;
    }

    auto grid = forecite::run_grid(corpus->docs, configs, fractions, recipe);
    set_out_string(grid_csv, forecite::grid_to_csv(grid));
  });
}

fc_status fc_grid_compare(const char* grid_csv_a, const char* grid_csv_b, char** report_json) {
  if (grid_csv_a == nullptr || grid_csv_b == nullptr || report_json == nullptr)
    return invalid("fc_grid_compare: NULL argument");
  return guarded([&] {
    auto grid_a = forecite::parse_grid_csv(grid_csv_a);
    auto grid_b = forecite::parse_grid_csv(grid_csv_b);
    forecite::GridComparison cmp = forecite::compare_checkpoints(grid_a, grid_b);
    json cells = json::array();
    for (const auto& d : cmp.deltas) {
      cells.push_back({{"params_b", d.params_b},
                       {"data_pct", d.data_pct},
                       {"split", d.split},
                       {"metric", d.metric},
                       {"delta", d.delta}});
    }
    json report = {{"cells", cells},
                   {"positive", cmp.positive},
                   {"negative", cmp.negative},
                   {"zero", cmp.zero}};
    set_out_string(report_json, report.dump());
  });
}

fc_status fc_fit_scaling(const char* grid_csv, const char* metric, const char* split,
                         char** fit_json) {
  if (grid_csv == nullptr || metric == nullptr || split == nullptr || fit_json == nullptr)
    return invalid("fc_fit_scaling: NULL argument");
  return guarded([&] {
    auto grid = forecite::parse_grid_csv(grid_csv);
    auto points = forecite::select_grid(grid, metric, split);
    if (points.empty())
      forecite::fail_invalid(std::string("fc_fit_scaling: no points for metric ") + metric +
                             " on split " + split);
    forecite::ScalingFit fit = forecite::fit_scaling(std::move(points));
    set_out_string(fit_json, forecite::scaling_fit_to_json(fit));
  });
}

fc_status fc_predict_scaling(double beta0, double beta1, double beta2, double params_b,
                             double data_pct, double* out) {
  if (out == nullptr) return invalid("fc_predict_scaling: NULL output");
  return guarded([&] {
    forecite::ScalingFit fit;
    fit.beta0 = beta0;
    fit.beta1 = beta1;
    fit.beta2 = beta2;
    *out = forecite::predict_scaling(fit, params_b, data_pct);
  });
}

fc_status fc_blob_hash(const char* content, size_t len, char** hex_out) {
  if (content == nullptr || hex_out == nullptr) return invalid("fc_blob_hash: NULL argument");
  return guarded([&] { set_out_string(hex_out, forecite::git_blob_sha1(std::string(content, len))); });
}

}  // extern "C"
