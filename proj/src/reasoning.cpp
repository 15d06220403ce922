#include "tatqa/reasoning.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>

#include "table_layout.hpp"
#include "tatqa/derivation.hpp"
#include "tatqa/error.hpp"
#include "tatqa/text.hpp"
#include "text_util.hpp"

namespace tatqa {

namespace {

std::vector<Rational> numeric_values(const Candidates& c) {
  std::vector<Rational> out;
  for (const auto& e : c)
    if (e.numeric) out.push_back(e.numeric->value);
  return out;
}

Candidates numeric_only(const Candidates& c) {
  Candidates out;
  for (const auto& e : c)
    if (e.numeric) out.push_back(e);
  return out;
}

// Highest probability among candidates passing `keep`; earliest wins ties.
const EvidenceCandidate* best_of(const Candidates& c, bool want_cell) {
  const EvidenceCandidate* best = nullptr;
  for (const auto& e : c) {
    if (e.is_cell() != want_cell) continue;
    if (!best || e.probability > best->probability || (e.probability == best->probability && e.origin < best->origin))
      best = &e;
  }
  return best;
}

bool has_any(std::string_view text, std::initializer_list<std::string_view> cues) {
  for (auto cue : cues)
    if (detail::contains(text, cue)) return true;
  return false;
}

std::optional<Scale> header_scale(const Table& t, const EvidenceCandidate& cell) {
  std::vector<std::size_t> header_rows;
  for (std::size_t r = 0; r < cell.origin.major; ++r)
    if (detail::is_header_row(t, r)) header_rows.push_back(r);
  // the candidate's own column first, then the caption column, then the rest
  std::vector<std::size_t> cols = {cell.origin.minor};
  if (cell.origin.minor != 0) cols.push_back(0);
  for (std::size_t c = 0; c < t.n_cols; ++c)
    if (c != cell.origin.minor && c != 0) cols.push_back(c);
  for (std::size_t c : cols)
    for (auto it = header_rows.rbegin(); it != header_rows.rend(); ++it)
      if (auto s = scale_cue(t.at(*it, c).text)) return s;
  if (auto s = scale_cue(t.at(cell.origin.major, 0).text)) return s;
  return std::nullopt;
}

std::optional<Scale> paragraph_scale(const HybridContext& ctx, const EvidenceCandidate& span) {
  const std::string& text = ctx.paragraphs.at(span.origin.major).text;
  auto words = split_words(text);
  // a scale word directly after the number ("$38.1 billion")
  for (std::size_t k = span.span_end; k < std::min(words.size(), span.span_end + 2); ++k)
    if (auto s = scale_cue(words[k].text); s && *s != Scale::Percent) return s;
  std::optional<Scale> best;
  std::size_t best_distance = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 0; k < words.size(); ++k) {
    if (k >= span.origin.minor && k < span.span_end) continue;
    auto s = scale_cue(words[k].text);
    if (!s || *s == Scale::Percent) continue;
    std::size_t d = k < span.origin.minor ? span.origin.minor - k : k - span.span_end + 1;
    if (d < best_distance) {
      best_distance = d;
      best = s;
    }
  }
  return best;
}

}  // namespace

Candidates rank_candidates(const Candidates& candidates) {
  Candidates ranked = numeric_only(candidates);
  std::stable_sort(ranked.begin(), ranked.end(), [](const EvidenceCandidate& a, const EvidenceCandidate& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.origin < b.origin;
  });
  return ranked;
}

Execution execute_operator_traced(Operator op, const Candidates& candidates, std::optional<int> order_flag) {
  auto need_numbers = [&](const char* what) {
    Candidates nums = numeric_only(candidates);
    if (nums.empty()) throw InsufficientEvidence(std::string(what) + " needs at least one numeric candidate");
    return nums;
  };
  switch (op) {
    case Operator::SpanInText:
    case Operator::CellInTable: {
      const EvidenceCandidate* best = best_of(candidates, op == Operator::CellInTable);
      if (!best)
        throw InsufficientEvidence(op == Operator::CellInTable ? "no cell candidate" : "no paragraph span candidate");
      return {best->text, {*best}};
    }
    case Operator::Spans: {
      if (candidates.empty()) throw InsufficientEvidence("Spans needs at least one candidate");
      std::vector<std::string> texts;
      for (const auto& c : candidates) texts.push_back(c.text);
      return {texts, candidates};
    }
    case Operator::Count:
      return {Rational(static_cast<long long>(candidates.size())), candidates};
    case Operator::Sum: {
      Candidates nums = need_numbers("Sum");
      Rational s = 0;
      for (const auto& v : numeric_values(nums)) s += v;
      return {s, nums};
    }
    case Operator::Average: {
      Candidates nums = need_numbers("Average");
      Rational s = 0;
      for (const auto& v : numeric_values(nums)) s += v;
      return {s / static_cast<long long>(nums.size()), nums};
    }
    case Operator::Multiplication: {
      Candidates nums = need_numbers("Multiplication");
      Rational p = 1;
      for (const auto& v : numeric_values(nums)) p *= v;
      return {p, nums};
    }
    case Operator::Division:
    case Operator::Difference:
    case Operator::ChangeRatio: {
      if (!order_flag) throw Error(std::string(operator_name(op)) + " requires an order flag");
      Candidates ranked = rank_candidates(candidates);
      if (ranked.size() < 2)
        throw InsufficientEvidence(std::string(operator_name(op)) + " needs two numeric candidates");
      Candidates top = {ranked[0], ranked[1]};
      if (*order_flag == 1) std::swap(top[0], top[1]);
      const Rational& a = top[0].numeric->value;
      const Rational& b = top[1].numeric->value;
      if (op == Operator::Difference) return {Rational(a - b), top};
      if (b == 0) throw ExecutionError(std::string(operator_name(op)) + " with a zero divisor");
      if (op == Operator::Division) return {Rational(a / b), top};
      return {Rational((a - b) / b), top};
    }
    case Operator::Other: break;
  }
  throw UnsupportedOperator("no aggregation operator supports this question");
}

AnswerValue execute_operator(Operator op, const Candidates& candidates, std::optional<int> order_flag) {
  return execute_operator_traced(op, candidates, order_flag).value;
}

int oracle_order(const QuestionRecord& question, const HybridContext& context) {
  if (!question.derivation) throw InsufficientEvidence(question.question_id + ": no derivation");
  SupervisionLabels labels = build_supervision(question, context);
  if (question.answer_type != AnswerType::Arithmetic || labels.evidence.size() < 2)
    throw InsufficientEvidence(question.question_id + ": number order needs a two-operand derivation");
  return labels.evidence[1].origins.front() < labels.evidence[0].origins.front() ? 1 : 0;
}

Operator keyword_operator(const std::string& question, const Candidates& candidates) {
  std::string q = detail::to_lower(question);
  // evaluated top to bottom; the first matching rule wins
  if (detail::contains(q, "how many") &&
      has_any(q, {"exceed", "more than", "less than", "greater than", "above", "below", "at least", "over ",
                  "under ", "how many years", "how many items", "how many types"}))
    return Operator::Count;
  if (has_any(q, {"percentage change", "percent change", "% change", "change ratio", "growth rate", "rate of change",
                  "percentage increase", "percentage decrease", "percent increase", "percent decrease"}))
    return Operator::ChangeRatio;
  if (has_any(q, {"change in", "difference", "increase in", "decrease in", "change from", "changed",
                  "did not come from", "excluding"}))
    return Operator::Difference;
  if (has_any(q, {"average", "mean "})) return Operator::Average;
  if (has_any(q, {"proportion", "account for", "ratio", "percentage of", "what percent", "% of"}))
    return Operator::Division;
  if (has_any(q, {"total", "sum ", "sum of", "combined", "altogether"})) return Operator::Sum;
  if (has_any(q, {"product of", "multiplied", "times"})) return Operator::Multiplication;
  if (q.starts_with("what are") || q.starts_with("what were") || q.starts_with("which years") ||
      q.starts_with("list") || detail::contains(q, " and what"))
    return Operator::Spans;
  const EvidenceCandidate* best = nullptr;
  for (const auto& c : candidates)
    if (!best || c.probability > best->probability) best = &c;
  return best && best->is_cell() ? Operator::CellInTable : Operator::SpanInText;
}

std::optional<Scale> scale_cue(std::string_view text) {
  std::string t = detail::to_lower(text);
  if (has_any(t, {"thousand", "'000", "\xE2\x80\x99" "000", "000s"})) return Scale::Thousand;
  if (has_any(t, {"million", "$m", "\xE2\x82\xAC" "m"})) return Scale::Million;
  for (const Word& w : split_words(t))
    if (w.text == "mn" || w.text == "(mn)") return Scale::Million;
  if (has_any(t, {"billion"})) return Scale::Billion;
  for (const Word& w : split_words(t))
    if (w.text == "bn" || w.text == "(bn)") return Scale::Billion;
  if (detail::trim(t) == "%" || detail::contains(t, "percent") || detail::contains(t, "(%)")) return Scale::Percent;
  return std::nullopt;
}

Scale heuristic_scale(const QuestionRecord& question, const HybridContext& context, const Candidates& operands,
                      Operator op) {
  if (op == Operator::Count) return Scale::None;
  std::string q = detail::to_lower(question.text);
  if (op == Operator::ChangeRatio || has_any(q, {"percentage", "percent", "%", "proportion", "ratio", "account for"}))
    return Scale::Percent;
  for (const auto& c : operands)
    if (c.numeric && c.numeric->had_percent_sign) return Scale::Percent;
  for (const auto& c : operands)
    if (c.is_cell() && c.numeric)
      if (auto s = header_scale(context.table, c)) return *s;
  for (const auto& c : operands)
    if (!c.is_cell() && c.numeric)
      if (auto s = paragraph_scale(context, c)) return *s;
  return Scale::None;
}

Prediction assemble_prediction(AnswerValue raw, Scale scale) {
  Prediction p;
  p.value = std::move(raw);
  p.scale = scale;
  return p;
}

std::string render_prediction(const Prediction& prediction) {
  std::string text;
  if (auto r = std::get_if<Rational>(&prediction.value)) {
    text = to_decimal_string(*r);
  } else {
    for (const auto& s : answer_strings(prediction.value)) {
      if (!text.empty()) text += ", ";
      text += s;
    }
  }
  if (prediction.scale != Scale::None) {
    text += ' ';
    text += scale_word(prediction.scale);
  }
  return text;
}

Operator OracleOperator::predict(const QuestionRecord& question, const HybridContext& context,
                                 const Candidates&) const {
  try {
    return build_supervision(question, context).g_op;
  } catch (const UnlocatableEvidence&) {
    return classify_question(question);
  }
}

Operator KeywordOperator::predict(const QuestionRecord& question, const HybridContext&,
                                  const Candidates& candidates) const {
  return keyword_operator(question.text, candidates);
}

int OracleOrder::decide(const QuestionRecord& question, const HybridContext& context,
                        std::span<const EvidenceCandidate, 2> top_two) const {
  int gold = oracle_order(question, context);
  // the gold flag is relative to input-sequence order; the ranking may disagree with it
  return top_two[0].origin < top_two[1].origin ? gold : 1 - gold;
}

Prediction answer_question(const QuestionRecord& question, const HybridContext& context, const Pipeline& pipeline) {
  Trace trace;
  TaggedSequence tags = pipeline.tagger.tag(question, context);
  trace.candidates = decode_evidence(tags, pipeline.threshold);
  trace.op = pipeline.op_predictor.predict(question, context, trace.candidates);
  if (trace.op == Operator::Other) {
    Prediction p = assemble_prediction(std::string(), Scale::None);
    p.abstained = true;
    p.abstain_reason = "unsupported operator";
    p.trace = std::move(trace);
    return p;
  }
  if (is_order_sensitive(trace.op)) {
    Candidates ranked = rank_candidates(trace.candidates);
    if (ranked.size() < 2)
      throw InsufficientEvidence(std::string(operator_name(trace.op)) + " needs two numeric candidates");
    std::array<EvidenceCandidate, 2> top = {ranked[0], ranked[1]};
    trace.order_flag = pipeline.order_decider.decide(question, context, std::span<const EvidenceCandidate, 2>(top));
  }
  Execution exec = execute_operator_traced(trace.op, trace.candidates, trace.order_flag);
  trace.operands = exec.operands;
  Scale scale = pipeline.scale_predictor.predict(question, context, trace.operands, trace.op);
  AnswerValue value = std::move(exec.value);
  if (auto r = std::get_if<Rational>(&value)) {
    trace.operator_result = *r;
    if (scale == Scale::Percent && (trace.op == Operator::Division || trace.op == Operator::ChangeRatio)) {
      *r *= 100;
      trace.percent_rescaled = true;
    }
  }
  Prediction p = assemble_prediction(std::move(value), scale);
  p.trace = std::move(trace);
  return p;
}

}  // namespace tatqa
