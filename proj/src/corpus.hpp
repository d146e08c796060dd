#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace forecite {

struct YearMonth {
  int year = 0;
  int month = 0;  // 1..12

  int index() const { return year * 12 + (month - 1); }
  auto operator<=>(const YearMonth&) const = default;
};

std::string format_ym(const YearMonth& ym);
YearMonth parse_ym(const std::string& s);

struct Section {
  std::string heading;
  std::string body;
};

struct DocumentRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::vector<Section> sections;
  std::vector<std::string> captions;
  std::optional<std::string> journal;
  std::optional<YearMonth> publication_date;
  long long total_citations = 0;
};

// JSON Lines reader. One document object per line; field names and types are
// validated; errors carry the 1-based line number, duplicate ids the id.
std::vector<DocumentRecord> ingest(const std::string& path);

void write_jsonl(const std::vector<DocumentRecord>& docs, const std::string& path);
std::string doc_to_json(const DocumentRecord& doc);
DocumentRecord doc_from_json(const std::string& json_text);

// Canonical Markdown layout: `# title`, optional `Journal:` / `Published:`
// metadata lines, `## Abstract` + abstract, `## heading` + body per section,
// `> caption` per caption; blocks separated by exactly one blank line.
std::string render_markdown(const DocumentRecord& doc);

struct RegionSpan {
  std::string region;  // title | metadata | abstract | section_<i> | caption
  size_t begin = 0;
  size_t end = 0;  // half-open byte range in the rendered text
};

// Same text as render_markdown plus a contiguous region cover of every byte.
std::pair<std::string, std::vector<RegionSpan>> render_markdown_spans(const DocumentRecord& doc);

struct FilterPolicy {
  int min_chars = 100;
  int max_chars = 50000;
  bool require_abstract = true;
  bool require_body = true;
  double min_ascii_ratio = 0.9;  // 0 disables the language heuristic
};

struct Rejection {
  std::string id;
  std::string reason;  // missing_title | missing_abstract | missing_body | too_short | too_long | non_ascii
};

std::pair<std::vector<DocumentRecord>, std::vector<Rejection>> filter_corpus(
    const std::vector<DocumentRecord>& docs, const FilterPolicy& policy);

// First occurrence wins; key = case-folded, whitespace-collapsed title.
std::vector<DocumentRecord> dedup(const std::vector<DocumentRecord>& docs);

struct SplitAssignment {
  std::map<std::string, bool> is_train;  // id -> train?
  std::vector<std::string> train_ids;    // sorted
  std::vector<std::string> test_ids;     // sorted
  double ratio = 0.9;
  uint64_t seed = 0;
};

SplitAssignment split(const std::vector<DocumentRecord>& docs, double ratio, uint64_t seed);

// train: published strictly before cutoff (undated docs land in train);
// holdout: the rest, sorted by publication date ascending.
std::pair<std::vector<DocumentRecord>, std::vector<DocumentRecord>> temporal_split(
    const std::vector<DocumentRecord>& docs, const YearMonth& cutoff);

struct SignalSpec {
  enum class Region { Title, Abstract, Body };
  enum class Kind { Count, Order };

  Region region = Region::Abstract;
  Kind kind = Kind::Count;
  int slots = 16;
  std::string marker = "zq";
  double base = 0.2;
  double slope = 0.25;
  double sigma_noise = 0.3;
  double p_lo = 0.05;
  double p_hi = 0.75;
  YearMonth date_lo{2014, 1};
  YearMonth date_hi{2022, 12};
  YearMonth cutoff{2024, 12};
  double delta = 1.0 / 299.0;
};

struct SynthDoc {
  DocumentRecord record;
  int marker_count = 0;
  double clean_log_rate = 0.0;  // base + slope * marker_count
  double noisy_log_rate = 0.0;  // clean + Gaussian noise, before count rounding
};

// Planted-signal generator. The signal region is a sequence of `slots` word
// slots; Count mode fills each slot with the marker (probability p_doc drawn
// per document) or a filler word, Order mode uses the marker's reversal as the
// only filler so byte counts carry no information. Citations invert the target
// transform at the document's months-to-cutoff and round to a non-negative
// integer. Fully seed-deterministic.
std::vector<SynthDoc> synthesize(int n_docs, const SignalSpec& spec, uint64_t seed);

std::vector<DocumentRecord> records_of(const std::vector<SynthDoc>& synth);

}  // namespace forecite
