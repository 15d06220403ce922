#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace tatqa {

// The ten aggregation operators plus the catch-all for calculations they cannot express.
// Declaration order is the cumulative order used by operator ablation.
enum class Operator {
  SpanInText,
  CellInTable,
  Spans,
  Sum,
  Count,
  Average,
  Multiplication,
  Division,
  Difference,
  ChangeRatio,
  Other,
};

inline constexpr std::array<Operator, 10> kSupportedOperators = {
    Operator::SpanInText, Operator::CellInTable, Operator::Spans,          Operator::Sum,
    Operator::Count,      Operator::Average,     Operator::Multiplication, Operator::Division,
    Operator::Difference, Operator::ChangeRatio};

inline constexpr std::array<Operator, 11> kAllOperators = {
    Operator::SpanInText, Operator::CellInTable,    Operator::Spans,    Operator::Sum,
    Operator::Count,      Operator::Average,        Operator::Multiplication,
    Operator::Division,   Operator::Difference,     Operator::ChangeRatio, Operator::Other};

constexpr bool is_order_sensitive(Operator op) {
  return op == Operator::Difference || op == Operator::Division || op == Operator::ChangeRatio;
}

constexpr bool is_span_family(Operator op) {
  return op == Operator::SpanInText || op == Operator::CellInTable || op == Operator::Spans;
}

// "Span-in-text", "Cell-in-table", ..., "Change ratio", "Other"
std::string_view operator_name(Operator op);
// "span_in_text", "cell_in_table", ..., "change_ratio", "other"
std::string_view operator_key(Operator op);
std::optional<Operator> parse_operator(std::string_view text);

}  // namespace tatqa
