#include "tatqa/evidence.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "table_layout.hpp"
#include "tatqa/derivation.hpp"
#include "tatqa/error.hpp"
#include "tatqa/text.hpp"
#include "text_util.hpp"

namespace tatqa {

namespace {

struct Evidence {
  std::string text;
  std::optional<Rational> value;
};

std::string strip_for_match(std::string_view s) {
  return detail::to_lower(detail::trim(s));
}

// Lower-case with surrounding punctuation removed and a plural "s" dropped.
std::string stem_word(std::string_view w) {
  std::size_t b = 0, e = w.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(w[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(w[e - 1]))) --e;
  std::string out = detail::to_lower(w.substr(b, e - b));
  if (out.size() > 3 && out.back() == 's') out.pop_back();
  return out;
}

std::vector<std::string> stem_words(std::string_view text) {
  std::vector<std::string> out;
  for (const Word& w : split_words(text)) {
    std::string s = stem_word(w.text);
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<Origin> covering_words(std::size_t paragraph, const std::vector<Word>& words, std::size_t begin,
                                   std::size_t end) {
  std::vector<Origin> out;
  for (std::size_t w = 0; w < words.size(); ++w)
    if (words[w].begin < end && words[w].end > begin) out.push_back(Origin::word(paragraph, w));
  return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

class Locator {
 public:
  explicit Locator(const HybridContext& context) : ctx_(context) {
    for (const auto& p : ctx_.paragraphs) words_.push_back(split_words(p.text));
  }

  std::optional<LocatedEvidence> find(const Evidence& ev, bool table_first) const {
    for (int tier = 0; tier < 2; ++tier) {
      for (int region = 0; region < 2; ++region) {
        bool table = (region == 0) == table_first;
        auto hit = table ? in_table(ev, tier) : in_paragraphs(ev, tier);
        if (hit) return LocatedEvidence{ev.text, *hit};
      }
    }
    return std::nullopt;
  }

 private:
  std::optional<std::vector<Origin>> in_table(const Evidence& ev, int tier) const {
    const Table& t = ctx_.table;
    if (ev.value) {
      for (const Cell& c : t.cells)
        if (c.numeric && (tier == 0 ? c.numeric->value == *ev.value : abs(c.numeric->value) == abs(*ev.value)))
          return std::vector<Origin>{Origin::cell(c.row, c.col)};
    }
    if (tier == 0) {
      std::string needle = strip_for_match(ev.text);
      for (const Cell& c : t.cells)
        if (!needle.empty() && strip_for_match(c.text) == needle) return std::vector<Origin>{Origin::cell(c.row, c.col)};
    } else {
      std::vector<std::string> needle = stem_words(ev.text);
      for (const Cell& c : t.cells)
        if (!needle.empty() && stem_words(c.text) == needle) return std::vector<Origin>{Origin::cell(c.row, c.col)};
    }
    return std::nullopt;
  }

  std::optional<std::vector<Origin>> in_paragraphs(const Evidence& ev, int tier) const {
    if (ev.value) {
      for (std::size_t p = 0; p < ctx_.paragraphs.size(); ++p)
        for (const NumberMatch& m : extract_numbers(ctx_.paragraphs[p].text))
          if (tier == 0 ? m.number.value == *ev.value : abs(m.number.value) == abs(*ev.value))
            return covering_words(p, words_[p], m.begin, m.end);
    }
    if (tier == 0) return substring_match(ev.text);
    std::vector<std::string> needle = stem_words(ev.text);
    if (needle.empty()) return std::nullopt;
    for (std::size_t p = 0; p < ctx_.paragraphs.size(); ++p) {
      std::vector<std::string> hay;
      for (const Word& w : words_[p]) hay.push_back(stem_word(w.text));
      for (std::size_t s = 0; s + needle.size() <= hay.size(); ++s)
        if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(s))) {
          std::vector<Origin> out;
          for (std::size_t k = 0; k < needle.size(); ++k) out.push_back(Origin::word(p, s + k));
          return out;
        }
    }
    return std::nullopt;
  }

  // Case-insensitive; a match on word boundaries anywhere beats an earlier inner match.
  std::optional<std::vector<Origin>> substring_match(const std::string& text) const {
    std::string needle = strip_for_match(text);
    if (needle.empty()) return std::nullopt;
    std::optional<std::vector<Origin>> inner;
    for (std::size_t p = 0; p < ctx_.paragraphs.size(); ++p) {
      std::string hay = detail::to_lower(ctx_.paragraphs[p].text);
      for (std::size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) {
        std::size_t end = at + needle.size();
        bool left = at == 0 || !is_word_char(hay[at - 1]) || !is_word_char(needle.front());
        bool right = end >= hay.size() || !is_word_char(hay[end]) || !is_word_char(needle.back());
        if (left && right) return covering_words(p, words_[p], at, end);
        if (!inner) inner = covering_words(p, words_[p], at, end);
      }
    }
    return inner;
  }

  const HybridContext& ctx_;
  std::vector<std::vector<Word>> words_;
};

// Operands that feed the gold operator: an average's divisor and a "* 100" percent
// conversion are constants, not evidence.
std::vector<ParsedNumber> operator_operands(const DerivationAst& ast, Operator op) {
  using Kind = ExprNode::Kind;
  const Expr& e = ast.expr();
  auto strip = [&](std::size_t i) {
    while (e.node(i).kind == Kind::Group) i = e.node(i).lhs;
    return i;
  };
  auto leaves_of = [&](std::size_t i) {
    Expr sub = e;
    sub.root = i;
    return operand_sequence(DerivationAst{sub});
  };
  std::size_t root = strip(e.root);
  const ExprNode& n = e.node(root);
  if (op == Operator::Average && n.kind == Kind::Div) return leaves_of(n.lhs);
  if ((op == Operator::ChangeRatio || op == Operator::Division) && n.kind == Kind::Mul) {
    const ExprNode& l = e.node(strip(n.lhs));
    std::size_t ratio = l.kind == Kind::Leaf && l.number.value == 100 ? n.rhs : n.lhs;
    return leaves_of(ratio);
  }
  if (op == Operator::ChangeRatio && n.kind == Kind::Div) return leaves_of(n.lhs);
  return operand_sequence(ast);
}

std::vector<Evidence> collect_evidence(const QuestionRecord& q, Operator* op_out) {
  std::vector<Evidence> out;
  auto add_text = [&](const std::string& s) {
    std::string key = strip_for_match(s);
    if (key.empty()) return;
    for (const auto& e : out)
      if (strip_for_match(e.text) == key) return;
    Evidence ev{s, std::nullopt};
    if (auto p = parse_number(s)) ev.value = p->value;
    out.push_back(std::move(ev));
  };
  switch (q.answer_type) {
    case AnswerType::Span:
    case AnswerType::Spans:
      for (const auto& s : answer_strings(q.answer)) add_text(s);
      break;
    case AnswerType::Counting: {
      DerivationAst ast = parse_derivation(*q.derivation, q.answer_type);
      for (const auto& item : ast.item_set().items) add_text(item);
      break;
    }
    case AnswerType::Arithmetic: {
      DerivationAst ast = parse_derivation(*q.derivation, q.answer_type);
      Operator op = classify_operator(&ast, q.answer_type, q.answer_source);
      if (op_out) *op_out = op;
      for (const ParsedNumber& n : operator_operands(ast, op)) {
        bool dup = false;
        for (const auto& e : out) dup = dup || (e.value && *e.value == n.value);
        if (dup) continue;
        NumberFormat f;
        f.thousands_separators = true;
        f.percent = n.had_percent_sign;
        out.push_back({render_number(n.value, f), n.value});
      }
      break;
    }
  }
  return out;
}

std::string origin_json_key(const Origin& o) {
  switch (o.kind) {
    case Origin::Kind::Question: return "question";
    case Origin::Kind::Cell: return "cell";
    case Origin::Kind::Word: return "word";
  }
  return "cell";
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a",     "an",    "the",   "of",    "in",    "on",    "at",    "to",    "for",   "from",  "by",
      "with",  "and",   "or",    "is",    "are",   "was",   "were",  "be",    "been",  "being", "did",
      "do",    "does",  "what",  "which", "who",   "whom",  "how",   "much",  "many",  "not",   "that",
      "this",  "these", "those", "it",    "its",   "as",    "than",  "there", "their", "they",  "we",
      "our",   "us",    "you",   "your",  "i",     "if",    "into",  "over",  "under", "up",    "down",
      "out",   "about", "has",   "have",  "had",   "will",  "would", "can",   "could", "should", "may",
      "all",   "any",   "each",  "per",   "s",     "between", "during", "respectively"};
  return words;
}

std::vector<std::size_t> sentence_ids(const std::vector<Word>& words) {
  std::vector<std::size_t> ids(words.size());
  std::size_t id = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    ids[i] = id;
    std::string_view w = words[i].text;
    while (!w.empty() && (w.back() == '"' || w.back() == '\'' || w.back() == ')')) w.remove_suffix(1);
    if (!w.empty() && (w.back() == '.' || w.back() == '?' || w.back() == '!')) ++id;
  }
  return ids;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& w : a) inter += b.count(w);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

bool overlaps(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& w : a)
    if (b.count(w)) return true;
  return false;
}

}  // namespace

std::string describe(const Origin& origin, const HybridContext& context) {
  switch (origin.kind) {
    case Origin::Kind::Question: return "question word " + std::to_string(origin.major);
    case Origin::Kind::Cell: return "cell(" + std::to_string(origin.major) + "," + std::to_string(origin.minor) + ")";
    case Origin::Kind::Word: {
      std::string id = origin.major < context.paragraphs.size() ? context.paragraphs[origin.major].paragraph_id
                                                                 : std::to_string(origin.major);
      return "paragraph " + id + " word " + std::to_string(origin.minor);
    }
  }
  return "?";
}

TaggedSequence make_unit_sequence(const std::string& question, const HybridContext& context) {
  TaggedSequence seq;
  auto qwords = split_words(question);
  for (std::size_t i = 0; i < qwords.size(); ++i)
    seq.units.push_back({std::string(qwords[i].text), Origin::question(i), 0.0});
  for (const Cell& c : context.table.cells) {
    auto words = split_words(c.text);
    if (words.empty()) seq.units.push_back({"", Origin::cell(c.row, c.col), 0.0});
    for (const Word& w : words) seq.units.push_back({std::string(w.text), Origin::cell(c.row, c.col), 0.0});
  }
  for (std::size_t p = 0; p < context.paragraphs.size(); ++p) {
    auto words = split_words(context.paragraphs[p].text);
    for (std::size_t i = 0; i < words.size(); ++i)
      seq.units.push_back({std::string(words[i].text), Origin::word(p, i), 0.0});
  }
  return seq;
}

void check_sequence(const TaggedSequence& sequence) {
  for (std::size_t i = 0; i < sequence.units.size(); ++i) {
    const TaggedUnit& u = sequence.units[i];
    if (!(u.probability >= 0.0 && u.probability <= 1.0))
      throw ValidationError("unit " + std::to_string(i), "probability outside [0,1]");
    if (i > 0 && u.origin < sequence.units[i - 1].origin)
      throw ValidationError("unit " + std::to_string(i), "units out of input-sequence order");
  }
}

std::optional<ParsedNumber> parse_span_number(std::string_view text) {
  if (auto p = parse_number(text)) return p;
  std::string_view t = detail::trim(text);
  while (!t.empty() && std::string_view(",.;:!?\"'").find(t.back()) != std::string_view::npos) t.remove_suffix(1);
  while (!t.empty() && (t.front() == '"' || t.front() == '\'')) t.remove_prefix(1);
  if (auto p = parse_number(t)) return p;
  bool open = t.find('(') != std::string_view::npos;
  bool close = t.find(')') != std::string_view::npos;
  if (close && !open && t.back() == ')') t.remove_suffix(1);
  if (open && !close && t.front() == '(') t.remove_prefix(1);
  return parse_number(t);
}

std::vector<EvidenceCandidate> decode_evidence(const TaggedSequence& tags, double threshold) {
  std::vector<EvidenceCandidate> out;
  std::size_t i = 0;
  const auto& u = tags.units;
  while (i < u.size()) {
    const Origin& o = u[i].origin;
    if (o.kind == Origin::Kind::Question) {
      ++i;
      continue;
    }
    if (o.is_cell()) {
      std::size_t j = i;
      double best = 0.0;
      bool positive = false;
      std::string text;
      for (; j < u.size() && u[j].origin == o; ++j) {
        positive = positive || u[j].probability > threshold;
        best = std::max(best, u[j].probability);
        if (!text.empty() && !u[j].text.empty()) text += ' ';
        text += u[j].text;
      }
      if (positive) {
        EvidenceCandidate c;
        c.numeric = parse_number(text);
        c.text = std::move(text);
        c.probability = best;
        c.origin = o;
        out.push_back(std::move(c));
      }
      i = j;
      continue;
    }
    // paragraph words: maximal runs of consecutive positive words
    if (!(u[i].probability > threshold)) {
      ++i;
      continue;
    }
    EvidenceCandidate c;
    c.origin = o;
    c.probability = u[i].probability;
    c.text = u[i].text;
    std::size_t last = o.minor;
    std::size_t j = i + 1;
    while (j < u.size() && u[j].origin.is_word() && u[j].origin.major == o.major &&
           u[j].origin.minor == last + 1 && u[j].probability > threshold) {
      c.text += ' ';
      c.text += u[j].text;
      c.probability = std::max(c.probability, u[j].probability);
      last = u[j].origin.minor;
      ++j;
    }
    c.span_end = last + 1;
    c.numeric = parse_span_number(c.text);
    out.push_back(std::move(c));
    i = j;
  }
  return out;
}

std::vector<std::string> evidence_strings(const QuestionRecord& question) {
  std::vector<std::string> out;
  for (auto& e : collect_evidence(question, nullptr)) out.push_back(std::move(e.text));
  return out;
}

SupervisionLabels build_supervision(const QuestionRecord& question, const HybridContext& context) {
  SupervisionLabels labels;
  Operator arithmetic_op = Operator::Other;
  std::vector<Evidence> evidence = collect_evidence(question, &arithmetic_op);
  Locator locator(context);
  bool table_first = source_has_table(question.answer_source);
  for (const Evidence& ev : evidence) {
    auto hit = locator.find(ev, table_first);
    if (!hit) throw UnlocatableEvidence(question.question_id, ev.text);
    for (const Origin& o : hit->origins) labels.g_tag.insert(o);
    labels.evidence.push_back(std::move(*hit));
  }
  SpanLocation where = SpanLocation::Unknown;
  if (!labels.evidence.empty())
    where = labels.evidence.front().origins.front().is_cell() ? SpanLocation::Table : SpanLocation::Text;
  labels.g_op = question.answer_type == AnswerType::Arithmetic ? arithmetic_op : classify_question(question, where);
  labels.g_scale = question.gold_scale;
  if (is_order_sensitive(labels.g_op)) {
    labels.g_order = 0;
    if (labels.evidence.size() >= 2 &&
        labels.evidence[1].origins.front() < labels.evidence[0].origins.front())
      labels.g_order = 1;
  }
  return labels;
}

std::string supervision_to_json_line(const QuestionRecord& question, const HybridContext& context,
                                     const SupervisionLabels& labels) {
  nlohmann::json j;
  j["question_id"] = question.question_id;
  j["g_op"] = std::string(operator_key(labels.g_op));
  j["g_scale"] = std::string(scale_word(labels.g_scale));
  j["g_order"] = labels.g_order ? nlohmann::json(*labels.g_order) : nlohmann::json(nullptr);
  nlohmann::json tags = nlohmann::json::array();
  for (const Origin& o : labels.g_tag) {
    nlohmann::json t;
    t["type"] = origin_json_key(o);
    if (o.is_cell()) {
      t["row"] = o.major;
      t["col"] = o.minor;
    } else {
      t["paragraph_id"] = context.paragraphs.at(o.major).paragraph_id;
      t["word"] = o.minor;
    }
    tags.push_back(std::move(t));
  }
  j["g_tag"] = std::move(tags);
  return j.dump();
}

TaggedSequence OracleTagger::tag(const QuestionRecord& question, const HybridContext& context) const {
  SupervisionLabels labels = build_supervision(question, context);
  TaggedSequence seq = make_unit_sequence(question.text, context);
  for (TaggedUnit& u : seq.units)
    if (labels.g_tag.count(u.origin)) u.probability = 1.0;
  return seq;
}

std::set<std::string> content_words(std::string_view text) {
  std::set<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !stopwords().count(cur)) out.insert(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool digit_comma = c == ',' && !cur.empty() && std::isdigit(static_cast<unsigned char>(cur.back())) &&
                       i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (digit_comma) continue;
    if (std::isalnum(static_cast<unsigned char>(c)))
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else
      flush();
  }
  flush();
  return out;
}

TaggedSequence LexicalTagger::tag(const QuestionRecord& question, const HybridContext& context) const {
  TaggedSequence seq = make_unit_sequence(question.text, context);
  const std::set<std::string> q = content_words(question.text);
  const Table& t = context.table;

  std::vector<double> cell_prob(t.cells.size(), kFloor);
  std::vector<bool> header(t.n_rows);
  for (std::size_t r = 0; r < t.n_rows; ++r) header[r] = detail::is_header_row(t, r);
  for (const Cell& c : t.cells) {
    double score = jaccard(q, content_words(c.text));
    if (c.numeric) {
      if (c.col > 0 && overlaps(q, content_words(t.at(c.row, 0).text))) score += kHeaderBonus;
      std::set<std::string> column_heading;
      for (std::size_t r = 0; r < c.row; ++r)
        if (header[r])
          for (auto& w : content_words(t.at(r, c.col).text)) column_heading.insert(w);
      if (!header[c.row] && overlaps(q, column_heading)) score += kHeaderBonus;
    }
    cell_prob[t.flat_index(c.row, c.col)] = kFloor + (1.0 - kFloor) * std::min(1.0, score);
  }

  std::vector<std::vector<double>> word_prob(context.paragraphs.size());
  for (std::size_t p = 0; p < context.paragraphs.size(); ++p) {
    const std::string& text = context.paragraphs[p].text;
    auto words = split_words(text);
    auto ids = sentence_ids(words);
    std::vector<double>& probs = word_prob[p];
    probs.assign(words.size(), kFloor);
    std::size_t s = 0;
    while (s < words.size()) {
      std::size_t e = s;
      while (e < words.size() && ids[e] == ids[s]) ++e;
      std::string_view sentence(text.data() + words[s].begin, words[e - 1].end - words[s].begin);
      double prob = kFloor + (1.0 - kFloor) * std::min(1.0, jaccard(q, content_words(sentence)));
      for (std::size_t k = s; k < e; ++k) probs[k] = prob;
      s = e;
    }
  }

  for (TaggedUnit& u : seq.units) {
    if (u.origin.is_cell())
      u.probability = cell_prob[t.flat_index(u.origin.major, u.origin.minor)];
    else if (u.origin.is_word())
      u.probability = word_prob[u.origin.major][u.origin.minor];
  }
  return seq;
}

}  // namespace tatqa
