#pragma once

#include <cstddef>
#include <string_view>

#include "tatqa/corpus.hpp"

namespace tatqa::detail {

// Four-digit integer in a plausible fiscal-year range, written without separators.
inline bool looks_like_year(std::string_view text) {
  std::size_t start = 0;
  while (start < text.size() && text[start] == ' ') ++start;
  std::size_t end = text.size();
  while (end > start && text[end - 1] == ' ') --end;
  if (end - start != 4) return false;
  int v = 0;
  for (std::size_t i = start; i < end; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
    v = v * 10 + (text[i] - '0');
  }
  return v >= 1900 && v <= 2100;
}

// A heading row: every non-empty cell past the first column is text or a year.
inline bool is_header_row(const Table& table, std::size_t row) {
  for (std::size_t c = 1; c < table.n_cols; ++c) {
    const Cell& cell = table.at(row, c);
    if (cell.numeric && !looks_like_year(cell.text)) return false;
  }
  return true;
}

}  // namespace tatqa::detail
