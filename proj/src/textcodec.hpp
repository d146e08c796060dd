#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forecite {

inline constexpr int kPadToken = 256;
inline constexpr int kBosToken = 257;
inline constexpr int kEosToken = 258;
inline constexpr int kVocabSize = 259;

struct TokenSequence {
  std::vector<int> ids;
  int attention_len = 0;  // non-pad prefix length
};

// BOS + leading bytes (truncated to max_len - 2) + EOS.
TokenSequence encode(std::string_view text, int max_len);

// Inverse on the byte payload; BOS/EOS/PAD are dropped.
std::string decode(const std::vector<int>& ids);

struct TokenBatch {
  std::vector<std::vector<int>> ids;   // right-padded to a common width
  std::vector<std::vector<int>> mask;  // 1 on real tokens, 0 on PAD
  size_t width = 0;
};

TokenBatch batch_encode(const std::vector<std::string>& texts, int max_len);

}  // namespace forecite
