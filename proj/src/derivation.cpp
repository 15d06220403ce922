#include "tatqa/derivation.hpp"

#include <cctype>

#include "tatqa/error.hpp"
#include "text_util.hpp"

namespace tatqa {

namespace {

using Kind = ExprNode::Kind;

struct Token {
  enum class Type { Number, Plus, Minus, Times, Divide, LParen, RParen, End };
  Type type = Type::End;
  std::size_t offset = 0;
  ParsedNumber number;
  Scale unit = Scale::None;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ignorable();
      Token t;
      t.offset = pos_;
      if (pos_ >= text_.size()) {
        t.type = Token::Type::End;
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]))) {
        lex_number(t);
      } else if (c == '+') {
        t.type = Token::Type::Plus;
        ++pos_;
      } else if (c == '-') {
        t.type = Token::Type::Minus;
        ++pos_;
      } else if (c == '*') {
        t.type = Token::Type::Times;
        ++pos_;
      } else if (c == '/') {
        t.type = Token::Type::Divide;
        ++pos_;
      } else if (c == '(') {
        t.type = Token::Type::LParen;
        ++pos_;
      } else if (c == ')') {
        t.type = Token::Type::RParen;
        ++pos_;
      } else if (eat("\xE2\x88\x92") || eat("\xE2\x80\x93")) {
        t.type = Token::Type::Minus;
      } else if (eat("\xC3\x97")) {
        t.type = Token::Type::Times;
      } else if (eat("\xC3\xB7")) {
        t.type = Token::Type::Divide;
      } else {
        throw DerivationParseError(pos_, std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool eat(std::string_view s) {
    if (text_.substr(pos_).starts_with(s)) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  void skip_ignorable() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (!(eat("US$") || eat("$") || eat("\xE2\x82\xAC") || eat("\xC2\xA3") || eat("\xC2\xA5"))) {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    std::string digits;
    std::size_t lead = 0;
    while (pos_ < text_.size() && is_digit(text_[pos_])) {
      digits.push_back(text_[pos_++]);
      ++lead;
    }
    while (lead > 0 && pos_ < text_.size() && text_[pos_] == ',') {
      std::size_t k = pos_ + 1, n = 0;
      while (k < text_.size() && is_digit(text_[k])) ++k, ++n;
      if (n != 3) throw DerivationParseError(pos_, "malformed thousands separator");
      digits.append(text_.substr(pos_ + 1, 3));
      pos_ = k;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      if (pos_ + 1 >= text_.size() || !is_digit(text_[pos_ + 1]))
        throw DerivationParseError(pos_, "decimal point without digits");
      digits.push_back('.');
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) digits.push_back(text_[pos_++]);
    }
    t.type = Token::Type::Number;
    t.number.value = *rational_from_decimal(digits);
    if (pos_ < text_.size() && text_[pos_] == '%') {
      t.number.had_percent_sign = true;
      ++pos_;
    }
    t.number.source_text = std::string(text_.substr(start, pos_ - start));
    // optional scale word: "38.1 billion"
    std::size_t k = pos_;
    while (k < text_.size() && text_[k] == ' ') ++k;
    std::size_t w = k;
    while (w < text_.size() && std::isalpha(static_cast<unsigned char>(text_[w]))) ++w;
    if (w > k) {
      std::string word = detail::to_lower(text_.substr(k, w - k));
      if (word.size() > 1 && word.back() == 's') word.pop_back();
      for (Scale s : {Scale::Thousand, Scale::Million, Scale::Billion})
        if (word == scale_word(s)) {
          t.unit = s;
          pos_ = w;
        }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Expr run() {
    expr_.root = parse_expr();
    if (peek().type != Token::Type::End) throw DerivationParseError(peek().offset, "unexpected trailing input");
    return std::move(expr_);
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  std::size_t add(ExprNode n) {
    expr_.nodes.push_back(std::move(n));
    return expr_.nodes.size() - 1;
  }

  std::size_t binary(Kind k, std::size_t lhs, std::size_t rhs) {
    ExprNode n;
    n.kind = k;
    n.lhs = lhs;
    n.rhs = rhs;
    n.offset = expr_.nodes[lhs].offset;
    return add(std::move(n));
  }

  std::size_t parse_expr() {
    std::size_t lhs = parse_term();
    while (peek().type == Token::Type::Plus || peek().type == Token::Type::Minus) {
      Kind k = next().type == Token::Type::Plus ? Kind::Add : Kind::Sub;
      lhs = binary(k, lhs, parse_term());
    }
    return lhs;
  }

  std::size_t parse_term() {
    std::size_t lhs = parse_factor();
    while (peek().type == Token::Type::Times || peek().type == Token::Type::Divide) {
      Kind k = next().type == Token::Type::Times ? Kind::Mul : Kind::Div;
      lhs = binary(k, lhs, parse_factor());
    }
    return lhs;
  }

  std::size_t parse_factor() {
    const Token& t = next();
    switch (t.type) {
      case Token::Type::Number: {
        ExprNode n;
        n.kind = Kind::Leaf;
        n.number = t.number;
        n.unit = t.unit;
        n.offset = t.offset;
        return add(std::move(n));
      }
      case Token::Type::Minus: {
        ExprNode n;
        n.kind = Kind::Neg;
        n.offset = t.offset;
        n.lhs = parse_factor();
        return add(std::move(n));
      }
      case Token::Type::LParen: {
        std::size_t inner = parse_expr();
        if (peek().type != Token::Type::RParen) throw DerivationParseError(peek().offset, "expected ')'");
        next();
        ExprNode n;
        n.kind = Kind::Group;
        n.offset = t.offset;
        n.lhs = inner;
        return add(std::move(n));
      }
      case Token::Type::End: throw DerivationParseError(t.offset, "unexpected end of derivation");
      default: throw DerivationParseError(t.offset, "expected a number, '(' or '-'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Expr expr_;
};

ItemSet split_items(std::string_view text) {
  ItemSet set;
  std::size_t start = 0;
  while (true) {
    std::size_t k = text.find("##", start);
    std::string_view piece = text.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start);
    std::string_view item = detail::trim(piece);
    if (!item.empty()) set.items.emplace_back(item);
    if (k == std::string_view::npos) break;
    start = k + 2;
  }
  if (set.items.empty()) throw DerivationParseError(0, "item set without items");
  return set;
}

void render_node(const Expr& e, std::size_t i, std::string& out) {
  const ExprNode& n = e.node(i);
  auto bin = [&](const char* op) {
    render_node(e, n.lhs, out);
    out += op;
    render_node(e, n.rhs, out);
  };
  switch (n.kind) {
    case Kind::Leaf: {
      NumberFormat f;
      f.thousands_separators = true;
      out += render_number(n.number.value, f);
      if (n.number.had_percent_sign) out += "%";
      if (n.unit != Scale::None) {
        out += " ";
        out += scale_word(n.unit);
      }
      break;
    }
    case Kind::Add: bin(" + "); break;
    case Kind::Sub: bin(" - "); break;
    case Kind::Mul: bin(" * "); break;
    case Kind::Div: bin(" / "); break;
    case Kind::Neg:
      out += "-";
      render_node(e, n.lhs, out);
      break;
    case Kind::Group:
      out += "(";
      render_node(e, n.lhs, out);
      out += ")";
      break;
  }
}

bool nodes_equal(const Expr& a, std::size_t i, const Expr& b, std::size_t j) {
  const ExprNode& x = a.node(i);
  const ExprNode& y = b.node(j);
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Kind::Leaf:
      return x.number.value == y.number.value && x.number.had_percent_sign == y.number.had_percent_sign &&
             x.unit == y.unit;
    case Kind::Neg:
    case Kind::Group: return nodes_equal(a, x.lhs, b, y.lhs);
    default: return nodes_equal(a, x.lhs, b, y.lhs) && nodes_equal(a, x.rhs, b, y.rhs);
  }
}

void collect_leaves(const Expr& e, std::size_t i, std::vector<ParsedNumber>& out) {
  const ExprNode& n = e.node(i);
  switch (n.kind) {
    case Kind::Leaf: out.push_back(n.number); break;
    case Kind::Neg:
    case Kind::Group: collect_leaves(e, n.lhs, out); break;
    default:
      collect_leaves(e, n.lhs, out);
      collect_leaves(e, n.rhs, out);
  }
}

// Structural matching helpers for operator classification.
std::size_t strip_groups(const Expr& e, std::size_t i) {
  while (e.node(i).kind == Kind::Group) i = e.node(i).lhs;
  return i;
}

// A number, possibly negated or parenthesized.
bool is_operand(const Expr& e, std::size_t i) {
  i = strip_groups(e, i);
  const ExprNode& n = e.node(i);
  if (n.kind == Kind::Leaf) return true;
  return n.kind == Kind::Neg && is_operand(e, n.lhs);
}

// Chain of one binary kind whose operands are all plain operands; counts them.
bool is_chain(const Expr& e, std::size_t i, Kind kind, std::size_t& operands) {
  i = strip_groups(e, i);
  const ExprNode& n = e.node(i);
  if (n.kind == kind) return is_chain(e, n.lhs, kind, operands) && is_chain(e, n.rhs, kind, operands);
  if (is_operand(e, i)) {
    ++operands;
    return true;
  }
  return false;
}

Rational operand_value(const Expr& e, std::size_t i) { return eval_expr(e, strip_groups(e, i)); }

bool is_literal(const Expr& e, std::size_t i, const Rational& value) {
  i = strip_groups(e, i);
  const ExprNode& n = e.node(i);
  return n.kind == Kind::Leaf && !n.number.had_percent_sign && n.unit == Scale::None && n.number.value == value;
}

Operator classify_expr(const Expr& e, std::size_t i, bool allow_percent_wrapper) {
  i = strip_groups(e, i);
  const ExprNode& n = e.node(i);
  if (n.kind == Kind::Sub && is_operand(e, n.lhs) && is_operand(e, n.rhs)) return Operator::Difference;
  if (n.kind == Kind::Div) {
    std::size_t num = strip_groups(e, n.lhs);
    const ExprNode& nn = e.node(num);
    if (nn.kind == Kind::Sub && is_operand(e, nn.lhs) && is_operand(e, nn.rhs) && is_operand(e, n.rhs) &&
        operand_value(e, nn.rhs) == operand_value(e, n.rhs))
      return Operator::ChangeRatio;
    if (is_operand(e, n.lhs) && is_operand(e, n.rhs)) return Operator::Division;
    std::size_t addends = 0;
    if (nn.kind == Kind::Add && is_chain(e, num, Kind::Add, addends) &&
        is_literal(e, n.rhs, Rational(static_cast<long long>(addends))))
      return Operator::Average;
    return Operator::Other;
  }
  std::size_t count = 0;
  if (n.kind == Kind::Add && is_chain(e, i, Kind::Add, count)) return Operator::Sum;
  if (n.kind == Kind::Mul) {
    // "(a - b) / b * 100" spells a change ratio in percent units
    if (allow_percent_wrapper) {
      for (auto [ratio, literal] : {std::pair{n.lhs, n.rhs}, std::pair{n.rhs, n.lhs}}) {
        if (!is_literal(e, literal, Rational(100))) continue;
        Operator inner = classify_expr(e, ratio, false);
        if (inner == Operator::ChangeRatio || inner == Operator::Division) return inner;
      }
    }
    count = 0;
    if (is_chain(e, i, Kind::Mul, count)) return Operator::Multiplication;
  }
  return Operator::Other;
}

}  // namespace

std::string_view operator_name(Operator op) {
  switch (op) {
    case Operator::SpanInText: return "Span-in-text";
    case Operator::CellInTable: return "Cell-in-table";
    case Operator::Spans: return "Spans";
    case Operator::Sum: return "Sum";
    case Operator::Count: return "Count";
    case Operator::Average: return "Average";
    case Operator::Multiplication: return "Multiplication";
    case Operator::Division: return "Division";
    case Operator::Difference: return "Difference";
    case Operator::ChangeRatio: return "Change ratio";
    case Operator::Other: return "Other";
  }
  return "Other";
}

std::string_view operator_key(Operator op) {
  switch (op) {
    case Operator::SpanInText: return "span_in_text";
    case Operator::CellInTable: return "cell_in_table";
    case Operator::Spans: return "spans";
    case Operator::Sum: return "sum";
    case Operator::Count: return "count";
    case Operator::Average: return "average";
    case Operator::Multiplication: return "multiplication";
    case Operator::Division: return "division";
    case Operator::Difference: return "difference";
    case Operator::ChangeRatio: return "change_ratio";
    case Operator::Other: return "other";
  }
  return "other";
}

std::optional<Operator> parse_operator(std::string_view text) {
  std::string t = detail::to_lower(detail::trim(text));
  for (Operator op : kAllOperators)
    if (t == operator_key(op) || t == detail::to_lower(operator_name(op))) return op;
  return std::nullopt;
}

DerivationAst parse_derivation(std::string_view text, AnswerType answer_type) {
  if (detail::trim(text).empty()) throw DerivationParseError(0, "empty derivation");
  if (detail::contains(text, "##") || answer_type == AnswerType::Counting) return {split_items(text)};
  return {Parser(Lexer(text).run()).run()};
}

Rational eval_expr(const Expr& e, std::size_t i) {
  const ExprNode& n = e.node(i);
  switch (n.kind) {
    case Kind::Leaf: return n.unit == Scale::None ? n.number.value : apply_scale(n.number.value, n.unit);
    case Kind::Neg: return -eval_expr(e, n.lhs);
    case Kind::Group: return eval_expr(e, n.lhs);
    case Kind::Add: return eval_expr(e, n.lhs) + eval_expr(e, n.rhs);
    case Kind::Sub: return eval_expr(e, n.lhs) - eval_expr(e, n.rhs);
    case Kind::Mul: return eval_expr(e, n.lhs) * eval_expr(e, n.rhs);
    case Kind::Div: {
      Rational d = eval_expr(e, n.rhs);
      if (d == 0) throw ExecutionError("division by zero at offset " + std::to_string(e.node(n.rhs).offset));
      return eval_expr(e, n.lhs) / d;
    }
  }
  return Rational(0);
}

Rational eval_derivation(const DerivationAst& ast) {
  if (!ast.is_expr()) return Rational(static_cast<long long>(ast.item_set().items.size()));
  return eval_expr(ast.expr(), ast.expr().root);
}

std::string render_derivation(const DerivationAst& ast) {
  if (!ast.is_expr()) {
    std::string out;
    for (const auto& item : ast.item_set().items) {
      if (!out.empty()) out += " ## ";
      out += item;
    }
    return out;
  }
  std::string out;
  render_node(ast.expr(), ast.expr().root, out);
  return out;
}

bool structurally_equal(const DerivationAst& a, const DerivationAst& b) {
  if (a.is_expr() != b.is_expr()) return false;
  if (!a.is_expr()) return a.item_set().items == b.item_set().items;
  return nodes_equal(a.expr(), a.expr().root, b.expr(), b.expr().root);
}

std::vector<ParsedNumber> operand_sequence(const DerivationAst& ast) {
  std::vector<ParsedNumber> out;
  if (ast.is_expr()) collect_leaves(ast.expr(), ast.expr().root, out);
  return out;
}

Operator classify_operator(const DerivationAst* ast, AnswerType answer_type, AnswerSource answer_source,
                           SpanLocation span_location) {
  switch (answer_type) {
    case AnswerType::Span:
      if (answer_source == AnswerSource::Text) return Operator::SpanInText;
      if (answer_source == AnswerSource::Table) return Operator::CellInTable;
      return span_location == SpanLocation::Text ? Operator::SpanInText : Operator::CellInTable;
    case AnswerType::Spans: return Operator::Spans;
    case AnswerType::Counting: return ast && !ast->is_expr() ? Operator::Count : Operator::Other;
    case AnswerType::Arithmetic:
      if (!ast || !ast->is_expr()) return Operator::Other;
      return classify_expr(ast->expr(), ast->expr().root, true);
  }
  return Operator::Other;
}

Operator classify_question(const QuestionRecord& question, SpanLocation span_location) {
  std::optional<DerivationAst> ast;
  if (question.derivation) {
    try {
      ast = parse_derivation(*question.derivation, question.answer_type);
    } catch (const DerivationParseError&) {
    }
  }
  return classify_operator(ast ? &*ast : nullptr, question.answer_type, question.answer_source, span_location);
}

}  // namespace tatqa
