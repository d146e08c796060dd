#include "saliency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "textcodec.hpp"

namespace forecite {

namespace {

struct Rgb {
  int r, g, b;
};

constexpr Rgb kRed{230, 25, 75};
constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kGreen{60, 180, 75};

Rgb lerp(const Rgb& from, const Rgb& to, double t) {
  auto mix = [t](int a, int b) {
    return static_cast<int>(std::llround(static_cast<double>(a) + t * static_cast<double>(b - a)));
  };
  return {mix(from.r, to.r), mix(from.g, to.g), mix(from.b, to.b)};
}

Rgb score_color(double score) {
  double s = std::min(1.0, std::max(-1.0, score));
  if (s < 0.0) return lerp(kWhite, kRed, -s);
  return lerp(kWhite, kGreen, s);
}

void append_escaped(std::string& out, char c) {
  switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    default: out += c;
  }
}

}  // namespace

TokenAttribution attribute(const RegressionLM& model, const DocumentRecord& doc,
                           const TargetStats& stats) {
  TokenAttribution attr;
  attr.text = render_markdown(doc);
  TokenSequence seq = encode(attr.text, model.config.max_seq_len);
  attr.ids = seq.ids;

  ForwardCache cache;
  attr.prediction = predict(model, seq.ids, seq.attention_len, &cache);
  attr.log_rate = destandardize(attr.prediction, stats);

  RegressionLM grads = zeros_like(model);
  BackwardOptions opts{false, false, false};
  Mat demb;
  backward_predict(model, cache, 1.0, grads, opts, &demb);

  attr.scores.resize(seq.ids.size());
  for (size_t i = 0; i < seq.ids.size(); ++i) {
    attr.scores[i] =
        demb.row(static_cast<long>(i)).dot(model.tok_emb.row(seq.ids[i]));
  }
  return attr;
}

void normalize_scores(TokenAttribution& attr) {
  double max_abs = 0.0;
  for (double s : attr.scores) max_abs = std::max(max_abs, std::abs(s));
  if (max_abs == 0.0) {
    attr.scale = 0.0;
    attr.normalized = true;
    return;
  }
  for (double& s : attr.scores) s /= max_abs;
  attr.scale = attr.normalized ? attr.scale * max_abs : max_abs;
  attr.normalized = true;
}

void export_heatmap(const DocumentRecord& doc, const TokenAttribution& attr,
                    const std::string& path) {
  if (!attr.normalized) fail_invalid("export_heatmap: attribution must be normalized first");
  if (attr.ids.size() != attr.scores.size())
    fail_invalid("export_heatmap: score/token length mismatch");

  std::string body;
  // One span per run of equally-colored bytes keeps the file small.
  std::string run_text;
  Rgb run_color{0, 0, 0};
  bool run_open = false;
  auto flush_run = [&]() {
    if (!run_open) return;
    body += "<span style=\"background-color:rgb(" + std::to_string(run_color.r) + "," +
            std::to_string(run_color.g) + "," + std::to_string(run_color.b) + ")\">" + run_text +
            "</span>";
    run_text.clear();
    run_open = false;
  };
  for (size_t i = 0; i < attr.ids.size(); ++i) {
    int id = attr.ids[i];
    if (id >= 256) continue;  // BOS/EOS carry no text
    Rgb color = score_color(attr.scores[i]);
    if (!run_open || color.r != run_color.r || color.g != run_color.g || color.b != run_color.b) {
      flush_run();
      run_color = color;
      run_open = true;
    }
    append_escaped(run_text, static_cast<char>(id));
  }
  flush_run();

  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>";
  std::string title_escaped;
  for (char c : doc.title) append_escaped(title_escaped, c);
  html << (doc.title.empty() ? "attribution heatmap" : title_escaped);
  html << "</title>\n<style>\n"
       << "body { font-family: monospace; margin: 2em; }\n"
       << ".doc { white-space: pre-wrap; max-width: 72em; }\n"
       << ".legend { margin-bottom: 1.5em; }\n"
       << ".legend .bar { display: inline-block; width: 16em; height: 1em;\n"
       << "  background: linear-gradient(to right, rgb(230,25,75), rgb(255,255,255), rgb(60,180,75)); }\n"
       << "</style>\n</head>\n<body>\n"
       << "<div class=\"legend\"><span>-1 (decreases predicted rate)</span> <span class=\"bar\"></span> "
       << "<span>+1 (increases predicted rate)</span></div>\n"
       << "<div class=\"doc\">" << body << "</div>\n</body>\n</html>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) fail_io("export_heatmap: cannot open " + path + " for writing");
  std::string text = html.str();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail_io("export_heatmap: write failed for " + path);
}

std::map<std::string, double> section_attribution_summary(const TokenAttribution& attr,
                                                          const DocumentRecord& doc) {
  auto [text, spans] = render_markdown_spans(doc);
  if (text != attr.text)
    fail_invalid("section_attribution_summary: attribution was computed on a different rendering");

  std::vector<double> scores = attr.scores;
  double max_abs = 0.0;
  for (double s : scores) max_abs = std::max(max_abs, std::abs(s));
  if (!attr.normalized && max_abs > 0.0)
    for (double& s : scores) s /= max_abs;

  auto region_at = [&](size_t byte_pos) -> const std::string& {
    for (const auto& span : spans)
      if (byte_pos >= span.begin && byte_pos < span.end) return span.region;
    fail_invalid("section_attribution_summary: byte position outside the rendered text");
  };

  std::map<std::string, double> sums;
  std::map<std::string, long long> counts;
  for (size_t i = 0; i < attr.ids.size(); ++i) {
    if (attr.ids[i] >= 256) continue;  // BOS/EOS carry no text span
    const std::string& region = region_at(i - 1);  // BOS occupies slot 0
    sums[region] += std::abs(scores[i]);
    counts[region] += 1;
  }

  std::map<std::string, double> means;
  for (const auto& [region, total] : sums)
    means[region] = total / static_cast<double>(counts[region]);
  return means;
}

std::string summary_to_csv(const std::map<std::string, double>& summary) {
  std::ostringstream out;
  out.precision(17);
  out << "region,mean_abs_score\n";
  for (const auto& [region, value] : summary) out << region << "," << value << "\n";
  return out.str();
}

}  // namespace forecite
