#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "rng.hpp"

namespace forecite {

using nlohmann::json;

std::string format_ym(const YearMonth& ym) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", ym.year, ym.month);
  return buf;
}

YearMonth parse_ym(const std::string& s) {
  if (s.size() != 7 || s[4] != '-' || !std::isdigit((unsigned char)s[0]) ||
      !std::isdigit((unsigned char)s[1]) || !std::isdigit((unsigned char)s[2]) ||
      !std::isdigit((unsigned char)s[3]) || !std::isdigit((unsigned char)s[5]) ||
      !std::isdigit((unsigned char)s[6])) {
    fail_parse("invalid year-month \"" + s + "\", expected YYYY-MM");
  }
  YearMonth ym{std::stoi(s.substr(0, 4)), std::stoi(s.substr(5, 2))};
  if (ym.month < 1 || ym.month > 12) fail_parse("invalid month in \"" + s + "\"");
  return ym;
}

namespace {

std::string type_name(const json& v) { return v.type_name(); }

const json& require_field(const json& obj, const char* key, size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail_parse("line " + std::to_string(line) + ": missing field \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, size_t line) {
  const json& v = require_field(obj, key, line);
  if (!v.is_string()) {
    fail_parse("line " + std::to_string(line) + ": field \"" + key + "\" must be a string, got " +
               type_name(v));
  }
  return v.get<std::string>();
}

DocumentRecord parse_doc(const json& obj, size_t line) {
  if (!obj.is_object()) fail_parse("line " + std::to_string(line) + ": expected a JSON object");
  DocumentRecord doc;
  doc.id = require_string(obj, "id", line);
  if (doc.id.empty()) fail_parse("line " + std::to_string(line) + ": empty id");
  doc.title = require_string(obj, "title", line);
  doc.abstract = require_string(obj, "abstract", line);

  const json& sections = require_field(obj, "sections", line);
  if (!sections.is_array()) {
    fail_parse("line " + std::to_string(line) + ": field \"sections\" must be an array");
  }
  for (const json& s : sections) {
    if (!s.is_object()) {
      fail_parse("line " + std::to_string(line) + ": each section must be an object");
    }
    doc.sections.push_back({require_string(s, "heading", line), require_string(s, "body", line)});
  }

  const json& captions = require_field(obj, "captions", line);
  if (!captions.is_array()) {
    fail_parse("line " + std::to_string(line) + ": field \"captions\" must be an array");
  }
  for (const json& c : captions) {
    if (!c.is_string()) {
      fail_parse("line " + std::to_string(line) + ": each caption must be a string");
    }
    doc.captions.push_back(c.get<std::string>());
  }

  std::string date = require_string(obj, "publication_date", line);
  try {
    doc.publication_date = parse_ym(date);
  } catch (const Error& e) {
    fail_parse("line " + std::to_string(line) + ": " + e.what());
  }

  const json& cits = require_field(obj, "total_citations", line);
  if (!cits.is_number_integer()) {
    fail_parse("line " + std::to_string(line) + ": field \"total_citations\" must be an integer");
  }
  doc.total_citations = cits.get<long long>();
  if (doc.total_citations < 0) {
    fail_parse("line " + std::to_string(line) + ": total_citations must be >= 0");
  }

  if (auto it = obj.find("journal"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) {
      fail_parse("line " + std::to_string(line) + ": field \"journal\" must be a string");
    }
    doc.journal = it->get<std::string>();
  }
  return doc;
}

bool whitespace_only(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::vector<DocumentRecord> ingest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("cannot open corpus file: " + path);
  std::vector<DocumentRecord> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (whitespace_only(line)) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      fail_parse("line " + std::to_string(lineno) + ": malformed JSON");
    }
    DocumentRecord doc = parse_doc(obj, lineno);
    if (!seen.insert(doc.id).second) {
      fail_parse("line " + std::to_string(lineno) + ": duplicate id \"" + doc.id + "\"");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string doc_to_json(const DocumentRecord& doc) {
  json obj;
  obj["id"] = doc.id;
  obj["title"] = doc.title;
  obj["abstract"] = doc.abstract;
  json sections = json::array();
  for (const Section& s : doc.sections) sections.push_back({{"heading", s.heading}, {"body", s.body}});
  obj["sections"] = sections;
  obj["captions"] = doc.captions;
  if (doc.journal) obj["journal"] = *doc.journal;
  if (doc.publication_date) obj["publication_date"] = format_ym(*doc.publication_date);
  obj["total_citations"] = doc.total_citations;
  return obj.dump();
}

DocumentRecord doc_from_json(const std::string& json_text) {
  json obj = json::parse(json_text, nullptr, false);
  if (obj.is_discarded()) fail_parse("malformed document JSON");
  bool dated = obj.is_object() && obj.contains("publication_date");
  if (obj.is_object() && !dated) obj["publication_date"] = "2000-01";
  DocumentRecord doc = parse_doc(obj, 1);
  if (!dated) doc.publication_date.reset();
  return doc;
}

void write_jsonl(const std::vector<DocumentRecord>& docs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_io("cannot write corpus file: " + path);
  for (const DocumentRecord& doc : docs) out << doc_to_json(doc) << '\n';
  if (!out) fail_io("write failed: " + path);
}

namespace {

void append_block(std::vector<std::pair<std::string, std::string>>& blocks, const std::string& region,
                  const std::string& text) {
  blocks.emplace_back(region, text);
}

std::vector<std::pair<std::string, std::string>> layout_blocks(const DocumentRecord& doc) {
  std::vector<std::pair<std::string, std::string>> blocks;
  if (!doc.title.empty()) append_block(blocks, "title", "# " + doc.title);
  if (doc.journal && !doc.journal->empty()) append_block(blocks, "metadata", "Journal: " + *doc.journal);
  if (doc.publication_date) {
    append_block(blocks, "metadata", "Published: " + format_ym(*doc.publication_date));
  }
  if (!doc.abstract.empty()) {
    append_block(blocks, "abstract", "## Abstract");
    append_block(blocks, "abstract", doc.abstract);
  }
  for (size_t i = 0; i < doc.sections.size(); ++i) {
    std::string region = "section_" + std::to_string(i + 1);
    append_block(blocks, region, "## " + doc.sections[i].heading);
    if (!doc.sections[i].body.empty()) append_block(blocks, region, doc.sections[i].body);
  }
  for (const std::string& caption : doc.captions) append_block(blocks, "caption", "> " + caption);
  return blocks;
}

}  // namespace

std::string render_markdown(const DocumentRecord& doc) {
  std::string out;
  bool first = true;
  for (const auto& [region, text] : layout_blocks(doc)) {
    if (!first) out += "\n\n";
    out += text;
    first = false;
  }
  return out;
}

std::pair<std::string, std::vector<RegionSpan>> render_markdown_spans(const DocumentRecord& doc) {
  std::string out;
  std::vector<RegionSpan> spans;
  auto blocks = layout_blocks(doc);
  for (size_t i = 0; i < blocks.size(); ++i) {
    size_t begin = out.size();
    out += blocks[i].second;
    if (i + 1 < blocks.size()) out += "\n\n";
    // The separator after a block belongs to that block's region so the spans
    // cover every byte exactly once.
    if (!spans.empty() && spans.back().region == blocks[i].first) {
      spans.back().end = out.size();
    } else {
      spans.push_back({blocks[i].first, begin, out.size()});
    }
  }
  return {std::move(out), std::move(spans)};
}

std::pair<std::vector<DocumentRecord>, std::vector<Rejection>> filter_corpus(
    const std::vector<DocumentRecord>& docs, const FilterPolicy& policy) {
  if (policy.min_chars <= 0 || policy.min_chars >= policy.max_chars) {
    fail_invalid("filter policy requires 0 < min_chars < max_chars");
  }
  std::vector<DocumentRecord> kept;
  std::vector<Rejection> rejected;
  for (const DocumentRecord& doc : docs) {
    std::string rendered = render_markdown(doc);
    std::string reason;
    bool has_body = std::any_of(doc.sections.begin(), doc.sections.end(),
                                [](const Section& s) { return !whitespace_only(s.body); });
    if (whitespace_only(doc.title)) {
      reason = "missing_title";
    } else if (policy.require_abstract && whitespace_only(doc.abstract)) {
      reason = "missing_abstract";
    } else if (policy.require_body && !has_body) {
      reason = "missing_body";
    } else if (rendered.size() < static_cast<size_t>(policy.min_chars)) {
      reason = "too_short";
    } else if (rendered.size() > static_cast<size_t>(policy.max_chars)) {
      reason = "too_long";
    } else if (policy.min_ascii_ratio > 0 && !rendered.empty()) {
      size_t ascii = std::count_if(rendered.begin(), rendered.end(),
                                   [](unsigned char c) { return c < 128; });
      if (static_cast<double>(ascii) / rendered.size() < policy.min_ascii_ratio) {
        reason = "non_ascii";
      }
    }
    if (reason.empty()) {
      kept.push_back(doc);
    } else {
      rejected.push_back({doc.id, reason});
    }
  }
  return {std::move(kept), std::move(rejected)};
}

namespace {

std::string dedup_key(const std::string& title) {
  std::string key;
  bool pending_space = false;
  for (unsigned char c : title) {
    if (std::isspace(c)) {
      pending_space = !key.empty();
    } else {
      if (pending_space) key += ' ';
      pending_space = false;
      key += static_cast<char>(std::tolower(c));
    }
  }
  return key;
}

}  // namespace

std::vector<DocumentRecord> dedup(const std::vector<DocumentRecord>& docs) {
  std::vector<DocumentRecord> out;
  std::unordered_set<std::string> seen;
  for (const DocumentRecord& doc : docs) {
    if (seen.insert(dedup_key(doc.title)).second) out.push_back(doc);
  }
  return out;
}

SplitAssignment split(const std::vector<DocumentRecord>& docs, double ratio, uint64_t seed) {
  if (docs.size() < 2) fail_invalid("split requires at least 2 documents");
  if (!(ratio > 0.0 && ratio < 1.0)) fail_invalid("split ratio must lie in (0, 1)");
  std::vector<std::string> ids;
  ids.reserve(docs.size());
  for (const DocumentRecord& doc : docs) ids.push_back(doc.id);
  std::sort(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(ids);
  size_t n = ids.size();
  size_t n_train = static_cast<size_t>(std::llround(ratio * static_cast<double>(n)));
  n_train = std::clamp<size_t>(n_train, 1, n - 1);

  SplitAssignment out;
  out.ratio = ratio;
  out.seed = seed;
  for (size_t i = 0; i < n; ++i) {
    bool is_train = i < n_train;
    out.is_train[ids[i]] = is_train;
    (is_train ? out.train_ids : out.test_ids).push_back(ids[i]);
  }
  std::sort(out.train_ids.begin(), out.train_ids.end());
  std::sort(out.test_ids.begin(), out.test_ids.end());
  return out;
}

std::pair<std::vector<DocumentRecord>, std::vector<DocumentRecord>> temporal_split(
    const std::vector<DocumentRecord>& docs, const YearMonth& cutoff) {
  std::vector<DocumentRecord> train, holdout;
  for (const DocumentRecord& doc : docs) {
    if (!doc.publication_date || *doc.publication_date < cutoff) {
      train.push_back(doc);
    } else {
      holdout.push_back(doc);
    }
  }
  std::stable_sort(holdout.begin(), holdout.end(), [](const DocumentRecord& a, const DocumentRecord& b) {
    return a.publication_date->index() < b.publication_date->index();
  });
  return {std::move(train), std::move(holdout)};
}

namespace {

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "bad",   "cage",  "dim",   "each", "fog",  "gild",  "hack", "jamb",
      "kelim", "lid",   "mace",  "bleak", "cheat", "debag", "film", "glade"};
  return words;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

std::vector<SynthDoc> synthesize(int n_docs, const SignalSpec& spec, uint64_t seed) {
  if (n_docs < 1) fail_invalid("synthesize requires n_docs >= 1");
  if (spec.slots < 1) fail_invalid("signal spec requires slots >= 1");
  if (spec.sigma_noise < 0) fail_invalid("sigma_noise must be >= 0");
  if (spec.delta <= 0) fail_invalid("delta must be > 0");
  if (spec.date_hi < spec.date_lo || !(spec.date_hi < spec.cutoff)) {
    fail_invalid("synthesize requires date_lo <= date_hi < cutoff");
  }

  std::string reversed_marker(spec.marker.rbegin(), spec.marker.rend());
  Rng rng(seed);
  std::vector<SynthDoc> out;
  out.reserve(n_docs);
  for (int i = 0; i < n_docs; ++i) {
    double p_doc = rng.uniform(spec.p_lo, spec.p_hi);
    int markers = 0;
    auto signal_words = [&]() {
      std::vector<std::string> words;
      words.reserve(spec.slots);
      for (int k = 0; k < spec.slots; ++k) {
        if (rng.next_double() < p_doc) {
          words.push_back(spec.marker);
          ++markers;
        } else if (spec.kind == SignalSpec::Kind::Order) {
          words.push_back(reversed_marker);
        } else {
          words.push_back(filler_words()[rng.next_below(filler_words().size())]);
        }
      }
      return join_words(words);
    };
    auto filler_text = [&](int count) {
      std::vector<std::string> words;
      words.reserve(count);
      for (int k = 0; k < count; ++k) {
        words.push_back(filler_words()[rng.next_below(filler_words().size())]);
      }
      return join_words(words);
    };

    SynthDoc sd;
    sd.record.id = "synth-" + std::to_string(i);
    sd.record.title =
        spec.region == SignalSpec::Region::Title ? signal_words() : filler_text(4);
    sd.record.abstract =
        spec.region == SignalSpec::Region::Abstract ? signal_words() : filler_text(spec.slots);
    std::string body =
        spec.region == SignalSpec::Region::Body ? signal_words() : filler_text(12);
    sd.record.sections.push_back({"Body", body});

    sd.marker_count = markers;
    sd.clean_log_rate = spec.base + spec.slope * markers;
    sd.noisy_log_rate = sd.clean_log_rate + spec.sigma_noise * rng.normal();

    int span = spec.date_hi.index() - spec.date_lo.index() + 1;
    int date_index = spec.date_lo.index() + static_cast<int>(rng.next_below(span));
    sd.record.publication_date = YearMonth{date_index / 12, date_index % 12 + 1};

    int months = std::max(1, spec.cutoff.index() - date_index);
    double rate = std::exp(sd.noisy_log_rate) - spec.delta;
    sd.record.total_citations = std::max<long long>(0, std::llround(rate * months));
    out.push_back(std::move(sd));
  }
  return out;
}

std::vector<DocumentRecord> records_of(const std::vector<SynthDoc>& synth) {
  std::vector<DocumentRecord> docs;
  docs.reserve(synth.size());
  for (const SynthDoc& sd : synth) docs.push_back(sd.record);
  return docs;
}

}  // namespace forecite
