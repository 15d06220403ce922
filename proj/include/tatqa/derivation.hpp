#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tatqa/corpus.hpp"
#include "tatqa/numerics.hpp"
#include "tatqa/operator.hpp"

namespace tatqa {

// Arithmetic expression tree stored in a node arena. Parenthesization is kept as
// explicit Group nodes so rendering reproduces the annotator's structure.
struct ExprNode {
  enum class Kind { Leaf, Add, Sub, Mul, Div, Neg, Group };
  Kind kind = Kind::Leaf;
  std::size_t lhs = 0;  // operand of Neg/Group, left operand of binary nodes
  std::size_t rhs = 0;
  ParsedNumber number;  // Leaf only; face value, percent sign stripped
  Scale unit = Scale::None;  // Leaf only; scale word written after the number ("38.1 billion")
  std::size_t offset = 0;    // byte offset of the node's first token in the source text
};

struct Expr {
  std::vector<ExprNode> nodes;
  std::size_t root = 0;

  const ExprNode& node(std::size_t i) const { return nodes[i]; }
  const ExprNode& root_node() const { return nodes[root]; }
};

struct ItemSet {
  std::vector<std::string> items;
};

struct DerivationAst {
  std::variant<Expr, ItemSet> body;

  bool is_expr() const { return std::holds_alternative<Expr>(body); }
  const Expr& expr() const { return std::get<Expr>(body); }
  const ItemSet& item_set() const { return std::get<ItemSet>(body); }
};

// Text containing "##" (or any derivation of a Counting question) becomes an ItemSet;
// everything else is parsed with
//   expr := term (('+'|'-') term)* ; term := factor (('*'|'/'|'×'|'÷') factor)* ;
//   factor := number [scale-word] | '(' expr ')' | '-' factor
// Whitespace and currency symbols are ignored. Throws DerivationParseError.
DerivationAst parse_derivation(std::string_view text, AnswerType answer_type = AnswerType::Arithmetic);

// Exact value for expressions (leaves with a scale word are multiplied by it); item
// count for item sets. Throws ExecutionError on a zero divisor.
Rational eval_derivation(const DerivationAst& ast);
Rational eval_expr(const Expr& expr, std::size_t node);

// Canonical text form; parse_derivation(render_derivation(a)) is structurally equal to a.
std::string render_derivation(const DerivationAst& ast);

bool structurally_equal(const DerivationAst& a, const DerivationAst& b);

// Leaves in left-to-right order (face values). Empty for item sets.
std::vector<ParsedNumber> operand_sequence(const DerivationAst& ast);

// Where the gold span was found, for Span questions whose source is Table-text.
enum class SpanLocation { Unknown, Table, Text };

// Structural reconstruction of the gold operator. `ast` may be absent for span
// questions or unparseable derivations (which map to Other).
Operator classify_operator(const DerivationAst* ast, AnswerType answer_type, AnswerSource answer_source,
                           SpanLocation span_location = SpanLocation::Unknown);

// Convenience for a gold record: parses its derivation when present.
Operator classify_question(const QuestionRecord& question, SpanLocation span_location = SpanLocation::Unknown);

}  // namespace tatqa
