#include "textcodec.hpp"

#include <algorithm>

#include "common.hpp"

namespace forecite {

TokenSequence encode(std::string_view text, int max_len) {
  if (max_len < 3) fail_invalid("encode requires max_len >= 3");
  size_t body = std::min(text.size(), static_cast<size_t>(max_len - 2));
  TokenSequence seq;
  seq.ids.reserve(body + 2);
  seq.ids.push_back(kBosToken);
  for (size_t i = 0; i < body; ++i) seq.ids.push_back(static_cast<unsigned char>(text[i]));
  seq.ids.push_back(kEosToken);
  seq.attention_len = static_cast<int>(seq.ids.size());
  return seq;
}

std::string decode(const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) {
    if (id < 0 || id >= kVocabSize) fail_invalid("token id out of range: " + std::to_string(id));
    if (id < 256) out += static_cast<char>(id);
  }
  return out;
}

TokenBatch batch_encode(const std::vector<std::string>& texts, int max_len) {
  if (texts.empty()) fail_invalid("batch_encode requires at least one text");
  TokenBatch batch;
  std::vector<TokenSequence> seqs;
  seqs.reserve(texts.size());
  for (const std::string& t : texts) {
    seqs.push_back(encode(t, max_len));
    batch.width = std::max(batch.width, seqs.back().ids.size());
  }
  for (TokenSequence& seq : seqs) {
    std::vector<int> mask(batch.width, 0);
    std::fill(mask.begin(), mask.begin() + seq.attention_len, 1);
    seq.ids.resize(batch.width, kPadToken);
    batch.ids.push_back(std::move(seq.ids));
    batch.mask.push_back(std::move(mask));
  }
  return batch;
}

}  // namespace forecite
