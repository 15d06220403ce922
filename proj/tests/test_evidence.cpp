#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "tatqa/error.hpp"
#include "tatqa/evidence.hpp"
#include "test_support.hpp"

using namespace tatqa;
using tatqa::testing::example;

namespace {

HybridContext small_context(const std::string& paragraph) {
  HybridContext ctx;
  ctx.context_id = "c";
  ctx.table = make_table("c", {{"", "2019", "2018"}, {"Devices", "5,134", "4,000"}, {"Other", "5,134", "12"}});
  ctx.paragraphs = {{"p1", 1, paragraph}, {"p2", 2, "Nothing to see here."}};
  return ctx;
}

QuestionRecord span_question(std::string answer, AnswerSource source) {
  QuestionRecord q;
  q.question_id = "q";
  q.text = "What was it?";
  q.answer = std::vector<std::string>{std::move(answer)};
  q.answer_type = AnswerType::Span;
  q.answer_source = source;
  return q;
}

std::size_t first_word_unit(const TaggedSequence& seq) {
  for (std::size_t i = 0; i < seq.units.size(); ++i)
    if (seq.units[i].origin.is_word()) return i;
  return seq.units.size();
}

}  // namespace

TEST(Decode, AllZeroIsEmpty) {
  HybridContext ctx = small_context("Sales were 5,134 units.");
  EXPECT_TRUE(decode_evidence(make_unit_sequence("q", ctx)).empty());
}

TEST(Decode, ParagraphRunsFormSpans) {
  HybridContext ctx = small_context("alpha beta gamma delta");
  TaggedSequence seq = make_unit_sequence("q", ctx);
  std::size_t w = first_word_unit(seq);
  seq.units[w].probability = 0.9;
  seq.units[w + 1].probability = 0.6;
  seq.units[w + 3].probability = 0.7;
  auto c = decode_evidence(seq);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].text, "alpha beta");
  EXPECT_DOUBLE_EQ(c[0].probability, 0.9);
  EXPECT_EQ(c[0].origin, Origin::word(0, 0));
  EXPECT_EQ(c[0].span_end, 2u);
  EXPECT_EQ(c[1].text, "delta");
}

TEST(Decode, CellWithOnePositiveUnit) {
  HybridContext ctx = small_context("x y");
  TaggedSequence seq = make_unit_sequence("q", ctx);
  for (auto& u : seq.units)
    if (u.origin == Origin::cell(1, 1)) u.probability = 0.8;
  auto c = decode_evidence(seq);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c[0].is_cell());
  ASSERT_TRUE(c[0].numeric);
  EXPECT_EQ(c[0].numeric->value, 5134);
}

TEST(Decode, ThresholdIsStrict) {
  HybridContext ctx = small_context("x y");
  TaggedSequence seq = make_unit_sequence("q", ctx);
  for (auto& u : seq.units)
    if (u.origin == Origin::cell(1, 1)) u.probability = 0.5;
  EXPECT_TRUE(decode_evidence(seq, 0.5).empty());
  EXPECT_EQ(decode_evidence(seq, 0.49).size(), 1u);
}

TEST(Decode, SequenceChecks) {
  HybridContext ctx = small_context("x y");
  TaggedSequence seq = make_unit_sequence("two words", ctx);
  EXPECT_NO_THROW(check_sequence(seq));
  EXPECT_EQ(seq.units.front().origin.kind, Origin::Kind::Question);
  seq.units[3].probability = 1.5;
  EXPECT_THROW(check_sequence(seq), ValidationError);
  seq = make_unit_sequence("two words", ctx);
  std::swap(seq.units[2], seq.units[5]);
  EXPECT_THROW(check_sequence(seq), ValidationError);
}

TEST(Supervision, WorkedExampleDifference) {
  auto [q, ctx] = example("rev-q6");
  SupervisionLabels s = build_supervision(q, ctx);
  EXPECT_EQ(s.g_op, Operator::Difference);
  EXPECT_EQ(s.g_tag, (std::set<Origin>{Origin::cell(11, 2), Origin::cell(9, 2)}));
  // 5,134 (Devices row) precedes 110,360 (Total row) in the flattened table
  EXPECT_EQ(s.g_order, 1);
  EXPECT_EQ(s.g_scale, Scale::Million);
}

TEST(Supervision, WorkedExampleCount) {
  auto [q, ctx] = example("rev-q4");
  SupervisionLabels s = build_supervision(q, ctx);
  EXPECT_EQ(s.g_op, Operator::Count);
  EXPECT_EQ(s.g_tag, (std::set<Origin>{Origin::cell(9, 0), Origin::cell(8, 0)}));
  EXPECT_FALSE(s.g_order);
}

TEST(Supervision, TableFirstThenParagraph) {
  auto [q, ctx] = example("rev-q7");
  SupervisionLabels s = build_supervision(q, ctx);
  EXPECT_EQ(s.g_op, Operator::Division);
  ASSERT_EQ(s.evidence.size(), 2u);
  EXPECT_TRUE(s.evidence[0].origins.front().is_word());
  EXPECT_EQ(s.evidence[1].origins.front(), Origin::cell(11, 1));
  EXPECT_EQ(s.g_order, 1);
}

TEST(Supervision, PercentOperandsInOrder) {
  auto [q, ctx] = example("tax-q1");
  SupervisionLabels s = build_supervision(q, ctx);
  EXPECT_EQ(s.g_op, Operator::Difference);
  EXPECT_EQ(s.g_order, 0);
  EXPECT_EQ(s.g_scale, Scale::Percent);
}

TEST(Supervision, SourceDecidesRegion) {
  HybridContext ctx = small_context("Sales were 5,134 units.");
  auto table_text = build_supervision(span_question("5,134", AnswerSource::TableText), ctx);
  EXPECT_EQ(table_text.g_tag, (std::set<Origin>{Origin::cell(1, 1)}));
  EXPECT_EQ(table_text.g_op, Operator::CellInTable);
  auto text = build_supervision(span_question("5,134", AnswerSource::Text), ctx);
  EXPECT_EQ(text.g_tag, (std::set<Origin>{Origin::word(0, 2)}));
  EXPECT_EQ(text.g_op, Operator::SpanInText);
}

TEST(Supervision, FirstOccurrenceOnly) {
  HybridContext ctx = small_context("nothing");
  auto s = build_supervision(span_question("5,134", AnswerSource::Table), ctx);
  EXPECT_EQ(s.g_tag, (std::set<Origin>{Origin::cell(1, 1)}));
}

TEST(Supervision, FallsBackToOtherRegion) {
  HybridContext ctx = small_context("Sales were 7,000 units.");
  auto s = build_supervision(span_question("7,000", AnswerSource::Table), ctx);
  EXPECT_EQ(s.g_tag, (std::set<Origin>{Origin::word(0, 2)}));
}

TEST(Supervision, Unlocatable) {
  HybridContext ctx = small_context("nothing");
  try {
    build_supervision(span_question("8,888", AnswerSource::Table), ctx);
    FAIL();
  } catch (const UnlocatableEvidence& e) {
    EXPECT_EQ(e.question_id, "q");
    EXPECT_EQ(e.evidence, "8,888");
  }
}

TEST(Supervision, JsonLine) {
  auto [q, ctx] = example("rev-q6");
  std::string line = supervision_to_json_line(q, ctx, build_supervision(q, ctx));
  EXPECT_NE(line.find("\"g_op\":\"difference\""), std::string::npos) << line;
  EXPECT_NE(line.find("\"g_order\":1"), std::string::npos) << line;
  EXPECT_EQ(line.find('\n'), std::string::npos);
}

// decode(oracle tags) recovers exactly the gold-positive origins
TEST(OracleTagger, DecodeRecoversGoldTags) {
  for (const auto& entry : tatqa::testing::worked_examples()) {
    for (const auto& q : entry.questions) {
      SupervisionLabels s = build_supervision(q, entry.context);
      std::set<Origin> recovered;
      for (const auto& c : decode_evidence(OracleTagger().tag(q, entry.context))) {
        if (c.is_cell()) {
          recovered.insert(c.origin);
        } else {
          for (std::size_t w = c.origin.minor; w < c.span_end; ++w) recovered.insert(Origin::word(c.origin.major, w));
        }
      }
      EXPECT_EQ(recovered, s.g_tag) << q.question_id;
    }
  }
}

TEST(LexicalTagger, HeaderOverlapRanksRelevantCells) {
  auto [q, ctx] = example("rev-q6");
  TaggedSequence seq = LexicalTagger().tag(q, ctx);
  check_sequence(seq);
  double devices = 0, total = 0, best_other = 0;
  for (const auto& u : seq.units) {
    if (!u.origin.is_cell()) continue;
    if (u.origin == Origin::cell(9, 2)) devices = u.probability;
    else if (u.origin == Origin::cell(11, 2)) total = u.probability;
    else if (ctx.table.at(u.origin.major, u.origin.minor).numeric) best_other = std::max(best_other, u.probability);
  }
  EXPECT_GT(devices, best_other);
  EXPECT_GT(total, best_other);
}

TEST(LexicalTagger, NoOverlapStaysAtFloor) {
  auto [q0, ctx] = example("rev-q6");
  QuestionRecord q = q0;
  q.text = "Zebras quietly juggle?";
  for (const auto& u : LexicalTagger().tag(q, ctx).units) EXPECT_LE(u.probability, LexicalTagger::kFloor + 1e-12);
}

TEST(LexicalTagger, Deterministic) {
  auto [q, ctx] = example("rev-q8");
  TaggedSequence a = LexicalTagger().tag(q, ctx), b = LexicalTagger().tag(q, ctx);
  ASSERT_EQ(a.units.size(), b.units.size());
  for (std::size_t i = 0; i < a.units.size(); ++i) EXPECT_EQ(a.units[i].probability, b.units[i].probability);
}

TEST(EvidenceProperty, ThresholdMonotone) {
  auto [q, ctx] = example("rev-q7");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    TaggedSequence seq = make_unit_sequence(q.text, ctx);
    for (auto& u : seq.units) u.probability = p(rng) < 0.6 ? 0.0 : p(rng);
    // spans can split as the threshold rises, so compare covered units, not counts
    std::set<Origin> prev;
    bool first = true;
    for (double t = 0.0; t < 1.0; t += 0.05) {
      std::set<Origin> covered;
      for (const auto& c : decode_evidence(seq, t)) {
        if (c.is_cell()) {
          covered.insert(c.origin);
        } else {
          for (std::size_t w = c.origin.minor; w < c.span_end; ++w) covered.insert(Origin::word(c.origin.major, w));
        }
      }
      if (!first) EXPECT_TRUE(std::includes(prev.begin(), prev.end(), covered.begin(), covered.end()));
      prev = std::move(covered);
      first = false;
    }
  }
}

// a candidate's probability is the max over its units, however the units are split
TEST(EvidenceProperty, MaxPooling) {
  HybridContext ctx = small_context("x y");
  ctx.table = make_table("c", {{"", "2019"}, {"Products and services", "5,134"}, {"Other", "12"}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    TaggedSequence seq = make_unit_sequence("q", ctx);
    double expected = 0;
    for (auto& u : seq.units) {
      u.probability = p(rng);
      if (u.origin == Origin::cell(1, 0)) expected = std::max(expected, u.probability);
    }
    for (const auto& c : decode_evidence(seq, 0.0))
      if (c.origin == Origin::cell(1, 0)) EXPECT_DOUBLE_EQ(c.probability, expected);
  }
}
