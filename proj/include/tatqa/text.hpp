#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace tatqa {

struct Word {
  std::string_view text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Whitespace tokenization with byte offsets. Used for paragraph words and length stats.
std::vector<Word> split_words(std::string_view text);

inline std::size_t word_count(std::string_view text) { return split_words(text).size(); }

}  // namespace tatqa
