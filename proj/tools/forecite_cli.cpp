// Command-line front end over the C API. Every experiment is one subcommand;
// heavyweight runs leave a manifest next to their primary output so results
// stay traceable to exact settings.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "forecite.h"

using json = nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(fc_status status) {
  int code = (status == FC_ERR_INVALID_ARGUMENT || status == FC_ERR_PARSE) ? kExitValidation
                                                                           : kExitRuntime;
  throw CliError{code, fc_last_error()};
}

void check(fc_status status) {
  if (status != FC_OK) fail(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitValidation, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitRuntime, "cannot open " + path + " for writing"};
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw CliError{kExitRuntime, "write failed for " + path};
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  fc_string_free(s);
  return out;
}

std::string utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string hash_bytes(const std::string& content) {
  char* hex = nullptr;
  check(fc_blob_hash(content.data(), content.size(), &hex));
  return take_string(hex);
}

// <primary>.manifest.json: config echo, input hashes, report; timestamps sit
// in their own field so primary outputs can be compared byte-for-byte.
void write_manifest(const std::string& primary_path, const std::string& command,
                    const json& config_echo, const json& inputs, const json& report,
                    const std::string& started) {
  json manifest;
  manifest["command"] = command;
  manifest["config"] = config_echo;
  manifest["inputs"] = inputs;
  manifest["primary_output"] = primary_path;
  manifest["report"] = report;
  manifest["timestamps"] = {{"started", started}, {"finished", utc_now()}};
  write_file(primary_path + ".manifest.json", manifest.dump(2) + "\n");
}

json parse_json_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw CliError{kExitValidation, what + ": invalid JSON"};
  return j;
}

struct CorpusHandle {
  fc_corpus* ptr = nullptr;
  ~CorpusHandle() { fc_corpus_free(ptr); }
};

struct ModelHandle {
  fc_model* ptr = nullptr;
  ~ModelHandle() { fc_model_free(ptr); }
};

int effective_workers(int requested) {
  const char* env = std::getenv("FORECITE_WORKERS");
  if (env == nullptr) return requested;
  int bound = std::atoi(env);
  if (bound < 1) return requested;
  return std::min(requested, bound);
}

int run(int argc, char** argv) {
  CLI::App app{"Citation-rate prediction from manuscript text"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fc_version()));

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "Read, filter, and dedup a JSONL corpus");
  std::string ingest_in, ingest_out, ingest_policy, ingest_report;
  bool keep_duplicates = false;
  ingest->add_option("--in", ingest_in, "Input JSONL path")->required();
  ingest->add_option("--out", ingest_out, "Output JSONL path")->required();
  ingest->add_option("--policy", ingest_policy, "Filter policy JSON file");
  ingest->add_option("--report", ingest_report, "Where to write the rejection report");
  ingest->add_flag("--keep-duplicates", keep_duplicates, "Skip title dedup");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Generate a planted-signal synthetic corpus");
  int synth_n = 0;
  uint64_t synth_seed = 0;
  std::string synth_out, synth_spec;
  synth->add_option("--n", synth_n, "Number of documents")->required();
  synth->add_option("--seed", synth_seed, "Generator seed")->required();
  synth->add_option("--out", synth_out, "Output JSONL path")->required();
  synth->add_option("--spec", synth_spec, "Signal spec JSON file");

  // ---- train ----
  auto* train = app.add_subcommand("train", "Two-phase training (or LM pretraining) on a corpus");
  std::string train_corpus, train_config, train_checkpoint;
  train->add_option("--corpus", train_corpus, "Corpus JSONL path")->required();
  train->add_option("--config", train_config, "Run config JSON file")->required();
  train->add_option("--checkpoint", train_checkpoint, "Checkpoint output path")->required();

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand("evaluate", "Metric report for a checkpoint on a corpus");
  std::string eval_corpus, eval_checkpoint, eval_side = "all", eval_out;
  double eval_ratio = 0.9;
  uint64_t eval_seed = 0;
  evaluate->add_option("--corpus", eval_corpus, "Corpus JSONL path")->required();
  evaluate->add_option("--checkpoint", eval_checkpoint, "Checkpoint path")->required();
  evaluate->add_option("--side", eval_side, "all | train | test");
  evaluate->add_option("--ratio", eval_ratio, "Split ratio when side is train/test");
  evaluate->add_option("--seed", eval_seed, "Split seed when side is train/test");
  evaluate->add_option("--out", eval_out, "Also write the report here");

  // ---- holdout ----
  auto* holdout = app.add_subcommand("holdout", "Expanding-window monthly correlation");
  std::string hold_corpus, hold_checkpoint, hold_cutoff, hold_out;
  holdout->add_option("--corpus", hold_corpus, "Corpus JSONL path")->required();
  holdout->add_option("--checkpoint", hold_checkpoint, "Checkpoint path")->required();
  holdout->add_option("--cutoff", hold_cutoff, "Holdout cutoff month YYYY-MM")->required();
  holdout->add_option("--out", hold_out, "CSV output path")->required();

  // ---- ablate ----
  auto* ablate = app.add_subcommand("ablate", "Empty the title or abstract field of every doc");
  std::string abl_corpus, abl_field, abl_out;
  ablate->add_option("--corpus", abl_corpus, "Corpus JSONL path")->required();
  ablate->add_option("--field", abl_field, "title | abstract")->required();
  ablate->add_option("--out", abl_out, "Output JSONL path")->required();

  // ---- grid ----
  auto* grid = app.add_subcommand("grid", "Size-by-data training grid");
  std::string grid_corpus, grid_config, grid_out, grid_initial;
  int grid_workers = 1;
  grid->add_option("--corpus", grid_corpus, "Corpus JSONL path")->required();
  grid->add_option("--config", grid_config, "Grid config JSON file")->required();
  grid->add_option("--out", grid_out, "Grid CSV output path")->required();
  grid->add_option("--initial-checkpoint", grid_initial, "Start cells from this base model");
  grid->add_option("--workers", grid_workers, "Concurrent cells (also bounded by FORECITE_WORKERS)");

  // ---- fit-scaling ----
  auto* fits = app.add_subcommand("fit-scaling", "Fit the tanh scaling law to a grid CSV");
  std::string fit_grid, fit_metric = "r", fit_split = "test", fit_out;
  fits->add_option("--grid", fit_grid, "Grid CSV path")->required();
  fits->add_option("--metric", fit_metric, "Metric name (default r)");
  fits->add_option("--split", fit_split, "train | test (default test)");
  fits->add_option("--out", fit_out, "Also write the fit JSON here");

  // ---- saliency ----
  auto* saliency = app.add_subcommand("saliency", "Gradient attribution heatmap for one document");
  std::string sal_corpus, sal_checkpoint, sal_html, sal_summary;
  size_t sal_index = 0;
  saliency->add_option("--corpus", sal_corpus, "Corpus JSONL path")->required();
  saliency->add_option("--checkpoint", sal_checkpoint, "Checkpoint path")->required();
  saliency->add_option("--index", sal_index, "Document index")->required();
  saliency->add_option("--html", sal_html, "Heatmap HTML output path")->required();
  saliency->add_option("--summary", sal_summary, "Per-region summary CSV output path");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(ingest)) {
    std::string started = utc_now();
    CorpusHandle corpus;
    check(fc_corpus_open(ingest_in.c_str(), &corpus.ptr));
    std::string policy_text = ingest_policy.empty() ? "{}" : read_file(ingest_policy);
    char* report = nullptr;
    check(fc_corpus_filter(corpus.ptr, policy_text.c_str(), &report));
    std::string rejections = take_string(report);
    if (!keep_duplicates) check(fc_corpus_dedup(corpus.ptr));
    check(fc_corpus_save(corpus.ptr, ingest_out.c_str()));
    if (!ingest_report.empty()) write_file(ingest_report, rejections + "\n");
    size_t n = 0;
    check(fc_corpus_size(corpus.ptr, &n));
    write_manifest(ingest_out, "ingest", parse_json_text(policy_text, "policy"),
                   {{"corpus", {{"path", ingest_in}, {"sha1", hash_bytes(read_file(ingest_in))}}}},
                   {{"kept", n}, {"rejections", parse_json_text(rejections, "rejections")}},
                   started);
    std::cout << "kept " << n << " documents\n";
    return 0;
  }

  if (app.got_subcommand(synth)) {
    std::string started = utc_now();
    std::string spec_text = synth_spec.empty() ? "{}" : read_file(synth_spec);
    CorpusHandle corpus;
    check(fc_corpus_synthesize(synth_n, synth_seed, spec_text.c_str(), &corpus.ptr));
    check(fc_corpus_save(corpus.ptr, synth_out.c_str()));
    write_manifest(synth_out, "synth",
                   {{"n", synth_n}, {"seed", synth_seed}, {"spec", parse_json_text(spec_text, "spec")}},
                   json::object(), json::object(), started);
    std::cout << "wrote " << synth_n << " documents to " << synth_out << "\n";
    return 0;
  }

  if (app.got_subcommand(train)) {
    std::string started = utc_now();
    std::string corpus_bytes = read_file(train_corpus);
    std::string config_text = read_file(train_config);
    CorpusHandle corpus;
    check(fc_corpus_open(train_corpus.c_str(), &corpus.ptr));
    char* report = nullptr;
    check(fc_train(corpus.ptr, config_text.c_str(), train_checkpoint.c_str(), &report));
    std::string report_text = take_string(report);
    write_manifest(train_checkpoint, "train", parse_json_text(config_text, "run config"),
                   {{"corpus", {{"path", train_corpus}, {"sha1", hash_bytes(corpus_bytes)}}}},
                   parse_json_text(report_text, "report"), started);
    std::cout << report_text << "\n";
    return 0;
  }

  if (app.got_subcommand(evaluate)) {
    CorpusHandle corpus;
    check(fc_corpus_open(eval_corpus.c_str(), &corpus.ptr));
    ModelHandle model;
    check(fc_model_open(eval_checkpoint.c_str(), &model.ptr));
    json selection = {{"side", eval_side}};
    if (eval_side != "all") {
      selection["ratio"] = eval_ratio;
      selection["seed"] = eval_seed;
    }
    char* metrics = nullptr;
    check(fc_model_evaluate(model.ptr, corpus.ptr, selection.dump().c_str(), &metrics));
    std::string metrics_text = take_string(metrics);
    if (!eval_out.empty()) write_file(eval_out, metrics_text + "\n");
    std::cout << metrics_text << "\n";
    return 0;
  }

  if (app.got_subcommand(holdout)) {
    std::string started = utc_now();
    CorpusHandle corpus;
    check(fc_corpus_open(hold_corpus.c_str(), &corpus.ptr));
    CorpusHandle before, after;
    check(fc_corpus_temporal_split(corpus.ptr, hold_cutoff.c_str(), &before.ptr, &after.ptr));
    ModelHandle model;
    check(fc_model_open(hold_checkpoint.c_str(), &model.ptr));
    char* csv = nullptr;
    check(fc_model_temporal_holdout(model.ptr, after.ptr, &csv));
    std::string csv_text = take_string(csv);
    write_file(hold_out, csv_text);
    write_manifest(hold_out, "holdout", {{"cutoff", hold_cutoff}},
                   {{"corpus", {{"path", hold_corpus}, {"sha1", hash_bytes(read_file(hold_corpus))}}},
                    {"checkpoint", hold_checkpoint}},
                   json::object(), started);
    std::cout << "wrote " << hold_out << "\n";
    return 0;
  }

  if (app.got_subcommand(ablate)) {
    CorpusHandle corpus;
    check(fc_corpus_open(abl_corpus.c_str(), &corpus.ptr));
    check(fc_corpus_ablate(corpus.ptr, abl_field.c_str()));
    check(fc_corpus_save(corpus.ptr, abl_out.c_str()));
    std::cout << "wrote " << abl_out << "\n";
    return 0;
  }

  if (app.got_subcommand(grid)) {
    std::string started = utc_now();
    std::string corpus_bytes = read_file(grid_corpus);
    json config = parse_json_text(read_file(grid_config), "grid config");
    config["workers"] = effective_workers(grid_workers);
    CorpusHandle corpus;
    check(fc_corpus_open(grid_corpus.c_str(), &corpus.ptr));
    char* csv = nullptr;
    check(fc_run_grid(corpus.ptr, config.dump().c_str(),
                      grid_initial.empty() ? nullptr : grid_initial.c_str(), &csv));
    std::string csv_text = take_string(csv);
    write_file(grid_out, csv_text);
    json inputs = {{"corpus", {{"path", grid_corpus}, {"sha1", hash_bytes(corpus_bytes)}}}};
    if (!grid_initial.empty()) inputs["initial_checkpoint"] = grid_initial;
    write_manifest(grid_out, "grid", config, inputs, json::object(), started);
    std::cout << "wrote " << grid_out << "\n";
    return 0;
  }

  if (app.got_subcommand(fits)) {
    std::string grid_text = read_file(fit_grid);
    char* fit = nullptr;
    check(fc_fit_scaling(grid_text.c_str(), fit_metric.c_str(), fit_split.c_str(), &fit));
    std::string fit_text = take_string(fit);
    if (!fit_out.empty()) write_file(fit_out, fit_text + "\n");
    std::cout << fit_text << "\n";
    return 0;
  }

  if (app.got_subcommand(saliency)) {
    CorpusHandle corpus;
    check(fc_corpus_open(sal_corpus.c_str(), &corpus.ptr));
    ModelHandle model;
    check(fc_model_open(sal_checkpoint.c_str(), &model.ptr));
    char* summary = nullptr;
    check(fc_model_saliency(model.ptr, corpus.ptr, sal_index, sal_html.c_str(),
                            sal_summary.empty() ? nullptr : &summary));
    if (!sal_summary.empty()) write_file(sal_summary, take_string(summary));
    std::cout << "wrote " << sal_html << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
