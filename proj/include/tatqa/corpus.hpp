#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tatqa/numerics.hpp"

namespace tatqa {

enum class AnswerType { Span, Spans, Counting, Arithmetic };
enum class AnswerSource { Table, Text, TableText };

inline constexpr std::array<AnswerType, 4> kAllAnswerTypes = {
    AnswerType::Span, AnswerType::Spans, AnswerType::Counting, AnswerType::Arithmetic};
inline constexpr std::array<AnswerSource, 3> kAllAnswerSources = {
    AnswerSource::Table, AnswerSource::Text, AnswerSource::TableText};

// Release vocabulary: "span", "multi-span", "count", "arithmetic".
std::string_view answer_type_word(AnswerType type);
std::string_view answer_type_name(AnswerType type);
std::optional<AnswerType> parse_answer_type(std::string_view text);

// Release vocabulary: "table", "text", "table-text".
std::string_view answer_source_word(AnswerSource source);
std::string_view answer_source_name(AnswerSource source);
std::optional<AnswerSource> parse_answer_source(std::string_view text);

inline bool source_has_table(AnswerSource s) { return s != AnswerSource::Text; }

struct Cell {
  std::string text;
  std::size_t row = 0;
  std::size_t col = 0;
  std::optional<ParsedNumber> numeric;
};

struct Table {
  std::string table_id;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<Cell> cells;  // row-major

  const Cell& at(std::size_t row, std::size_t col) const { return cells[row * n_cols + col]; }
  std::size_t flat_index(std::size_t row, std::size_t col) const { return row * n_cols + col; }
};

// Builds a rectangular table from rows of cell strings; numeric fields are filled in.
// Throws ValidationError on ragged or empty input.
Table make_table(std::string table_id, const std::vector<std::vector<std::string>>& rows);

struct Paragraph {
  std::string paragraph_id;
  int order = 0;
  std::string text;
};

struct HybridContext {
  std::string context_id;
  Table table;
  std::vector<Paragraph> paragraphs;  // sorted by order
};

// A single answer string, a list of answer strings, or a number.
using AnswerValue = std::variant<std::string, std::vector<std::string>, Rational>;

std::vector<std::string> answer_strings(const AnswerValue& answer);
std::optional<Rational> answer_number(const AnswerValue& answer);

struct QuestionRecord {
  std::string question_id;
  int order = 0;
  std::string text;
  AnswerValue answer;
  AnswerType answer_type = AnswerType::Span;
  AnswerSource answer_source = AnswerSource::Text;
  Scale gold_scale = Scale::None;
  std::optional<std::string> derivation;
  // Fields outside the data model, kept verbatim (raw JSON) for re-serialization.
  std::map<std::string, std::string> extra_fields;
};

struct DatasetEntry {
  HybridContext context;
  std::vector<QuestionRecord> questions;
  std::map<std::string, std::string> extra_fields;
};

using Dataset = std::vector<DatasetEntry>;

struct LoadOptions {
  // Fail on unknown fields, missing optional fields and type coercions.
  bool strict = false;
};

struct Diagnostics {
  std::vector<std::string> warnings;
};

Dataset parse_dataset(std::string_view json_text, const LoadOptions& options = {},
                      Diagnostics* diagnostics = nullptr);
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {},
                     Diagnostics* diagnostics = nullptr);

std::string serialize_dataset(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

std::size_t question_count(const Dataset& dataset);

// Field inventory observed in a release file: for each record level, every field name
// with the number of records carrying it and the JSON kinds seen.
struct FieldInventory {
  std::size_t records = 0;
  std::map<std::string, std::size_t> field_counts;
  std::map<std::string, std::map<std::string, std::size_t>> field_kinds;
};

struct SchemaReport {
  std::map<std::string, FieldInventory> levels;  // "context", "table", "paragraph", "question"
  std::vector<std::string> deviations;            // relative to the expected release schema
};

SchemaReport schema_report(std::string_view json_text);
std::string format_schema_report(const SchemaReport& report);

struct SplitStats {
  std::size_t contexts = 0;
  std::size_t questions = 0;
  double avg_rows = 0;
  double avg_cols = 0;
  double avg_paragraphs = 0;
  double avg_paragraph_words = 0;
  double avg_question_words = 0;
  double avg_answer_words = 0;
};

SplitStats split_stats(const Dataset& dataset);

struct TypeSourceMatrix {
  std::array<std::array<std::size_t, 3>, 4> counts{};  // [answer_type][answer_source]

  std::size_t row_total(AnswerType type) const;
  std::size_t col_total(AnswerSource source) const;
  std::size_t total() const;
  std::size_t at(AnswerType type, AnswerSource source) const {
    return counts[static_cast<std::size_t>(type)][static_cast<std::size_t>(source)];
  }
};

TypeSourceMatrix type_source_matrix(const Dataset& dataset);

struct ScaleDistribution {
  std::array<std::size_t, 5> counts{};
  std::size_t total = 0;
  // Percentage of questions per scale; all zero for an empty dataset.
  double percent(Scale scale) const;
};

ScaleDistribution scale_distribution(const Dataset& dataset);

}  // namespace tatqa
