#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tatqa/corpus.hpp"
#include "tatqa/numerics.hpp"
#include "tatqa/operator.hpp"

namespace tatqa {

// Position of a tagging unit in the input sequence: question words, then table cells
// flattened by row, then paragraph words. The defaulted ordering is that sequence order.
struct Origin {
  enum class Kind { Question, Cell, Word };
  Kind kind = Kind::Cell;
  std::size_t major = 0;  // question word | cell row | paragraph index in HybridContext::paragraphs
  std::size_t minor = 0;  // 0            | cell col | word index within the paragraph

  static Origin question(std::size_t word) { return {Kind::Question, word, 0}; }
  static Origin cell(std::size_t row, std::size_t col) { return {Kind::Cell, row, col}; }
  static Origin word(std::size_t paragraph, std::size_t word) { return {Kind::Word, paragraph, word}; }

  bool is_cell() const { return kind == Kind::Cell; }
  bool is_word() const { return kind == Kind::Word; }

  auto operator<=>(const Origin&) const = default;
};

std::string describe(const Origin& origin, const HybridContext& context);

struct TaggedUnit {
  std::string text;
  Origin origin;
  double probability = 0.0;  // probability of tag I
};

struct TaggedSequence {
  std::vector<TaggedUnit> units;
};

// All units of (question, context) in input-sequence order with probability 0. Cells
// contribute one unit per whitespace word (at least one unit per cell).
TaggedSequence make_unit_sequence(const std::string& question, const HybridContext& context);

// Throws ValidationError when a probability leaves [0,1] or units are out of order.
void check_sequence(const TaggedSequence& sequence);

struct EvidenceCandidate {
  std::string text;
  double probability = 0.0;
  Origin origin;                // cell, or first word of a paragraph span
  std::size_t span_end = 0;     // paragraph spans: one past the last word index
  std::optional<ParsedNumber> numeric;

  bool is_cell() const { return origin.is_cell(); }
};

// Cells with any unit above `threshold` are candidates; maximal runs of positive words in
// a paragraph form one span each. Candidate probability is the max over its units.
// Output is in input-sequence order.
std::vector<EvidenceCandidate> decode_evidence(const TaggedSequence& tags, double threshold = 0.5);

// Number reading of a decoded span; tolerates punctuation glued to a word ("$0.22.").
std::optional<ParsedNumber> parse_span_number(std::string_view text);

struct LocatedEvidence {
  std::string evidence;
  std::vector<Origin> origins;  // one cell, or the words of one paragraph span
};

struct SupervisionLabels {
  std::set<Origin> g_tag;
  Operator g_op = Operator::Other;
  Scale g_scale = Scale::None;
  std::optional<int> g_order;     // present iff g_op is order-sensitive
  std::vector<LocatedEvidence> evidence;
};

// Gold tags, operator, scale and number order for one question. Throws
// UnlocatableEvidence when an evidence string occurs nowhere in the context.
SupervisionLabels build_supervision(const QuestionRecord& question, const HybridContext& context);

// Evidence strings for a question: answer spans, counted items, or the derivation
// operands that feed the gold operator (rendered back to surface form).
std::vector<std::string> evidence_strings(const QuestionRecord& question);

// One JSON object per line: question_id, g_op, g_scale, g_order, g_tag.
std::string supervision_to_json_line(const QuestionRecord& question, const HybridContext& context,
                                     const SupervisionLabels& labels);

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual TaggedSequence tag(const QuestionRecord& question, const HybridContext& context) const = 0;
};

// Probability 1 on the gold-positive origins, 0 elsewhere.
class OracleTagger final : public Tagger {
 public:
  TaggedSequence tag(const QuestionRecord& question, const HybridContext& context) const override;
};

// Content-word Jaccard overlap between the question and each unit's enclosing cell or
// sentence, smoothed by a floor; numeric cells get a bonus for each header (row label,
// column heading) that shares a word with the question.
class LexicalTagger final : public Tagger {
 public:
  static constexpr double kFloor = 0.01;
  static constexpr double kHeaderBonus = 0.25;

  TaggedSequence tag(const QuestionRecord& question, const HybridContext& context) const override;
};

// Lower-cased content words with stopwords removed; numbers lose their separators.
std::set<std::string> content_words(std::string_view text);

}  // namespace tatqa
