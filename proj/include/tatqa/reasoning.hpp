#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tatqa/corpus.hpp"
#include "tatqa/evidence.hpp"
#include "tatqa/numerics.hpp"
#include "tatqa/operator.hpp"

namespace tatqa {

using Candidates = std::vector<EvidenceCandidate>;

class OperatorPredictor {
 public:
  virtual ~OperatorPredictor() = default;
  virtual Operator predict(const QuestionRecord& question, const HybridContext& context,
                           const Candidates& candidates) const = 0;
};

// Returns 1 when the top-two ranked numbers must be swapped before applying the
// operator. Consulted only for Difference, Division and Change ratio.
class OrderDecider {
 public:
  virtual ~OrderDecider() = default;
  virtual int decide(const QuestionRecord& question, const HybridContext& context,
                     std::span<const EvidenceCandidate, 2> top_two) const = 0;
};

// `operands` are the candidates the operator actually consumed.
class ScalePredictor {
 public:
  virtual ~ScalePredictor() = default;
  virtual Scale predict(const QuestionRecord& question, const HybridContext& context, const Candidates& operands,
                        Operator op) const = 0;
};

struct Trace {
  Operator op = Operator::Other;
  Candidates candidates;  // everything decoded from the tagger
  Candidates operands;    // what the operator used, after ranking and order swap
  std::optional<int> order_flag;
  std::optional<Rational> operator_result;  // numeric result before percent rescaling
  bool percent_rescaled = false;            // ratio multiplied by 100 for a Percent answer
};

struct Prediction {
  AnswerValue value;
  Scale scale = Scale::None;
  bool abstained = false;
  std::string abstain_reason;
  Trace trace;
};

// Numeric candidates only, by probability descending; ties keep input-sequence order.
Candidates rank_candidates(const Candidates& candidates);

struct Execution {
  AnswerValue value;
  Candidates operands;
};

// Throws UnsupportedOperator for Other, InsufficientEvidence when the operator lacks
// inputs, ExecutionError on a zero divisor.
Execution execute_operator_traced(Operator op, const Candidates& candidates, std::optional<int> order_flag);
AnswerValue execute_operator(Operator op, const Candidates& candidates, std::optional<int> order_flag = std::nullopt);

// Gold number order: 0 when the first two derivation operands appear in that order in
// the input sequence, 1 otherwise. Throws InsufficientEvidence for single-operand
// derivations and UnlocatableEvidence when an operand is missing from the context.
int oracle_order(const QuestionRecord& question, const HybridContext& context);

// Ordered keyword rules; see the implementation for the table.
Operator keyword_operator(const std::string& question, const Candidates& candidates);

Scale heuristic_scale(const QuestionRecord& question, const HybridContext& context, const Candidates& operands,
                      Operator op);

// Scale word written in a table heading or next to a number ("(In millions)", "$'000").
std::optional<Scale> scale_cue(std::string_view text);

Prediction assemble_prediction(AnswerValue raw, Scale scale);

// Answer as emitted in string form: numbers rendered exactly, the scale word appended
// for strings when the scale is not None.
std::string render_prediction(const Prediction& prediction);

class OracleOperator final : public OperatorPredictor {
 public:
  Operator predict(const QuestionRecord& question, const HybridContext& context,
                   const Candidates& candidates) const override;
};

class KeywordOperator final : public OperatorPredictor {
 public:
  Operator predict(const QuestionRecord& question, const HybridContext& context,
                   const Candidates& candidates) const override;
};

class OracleOrder final : public OrderDecider {
 public:
  int decide(const QuestionRecord& question, const HybridContext& context,
             std::span<const EvidenceCandidate, 2> top_two) const override;
};

// Always keeps the ranked order.
class PositionalOrder final : public OrderDecider {
 public:
  int decide(const QuestionRecord&, const HybridContext&, std::span<const EvidenceCandidate, 2>) const override {
    return 0;
  }
};

class OracleScale final : public ScalePredictor {
 public:
  Scale predict(const QuestionRecord& question, const HybridContext&, const Candidates&, Operator) const override {
    return question.gold_scale;
  }
};

class HeuristicScale final : public ScalePredictor {
 public:
  Scale predict(const QuestionRecord& question, const HybridContext& context, const Candidates& operands,
                Operator op) const override {
    return heuristic_scale(question, context, operands, op);
  }
};

struct Pipeline {
  const Tagger& tagger;
  const OperatorPredictor& op_predictor;
  const OrderDecider& order_decider;
  const ScalePredictor& scale_predictor;
  double threshold = 0.5;
};

// tag -> decode -> operator -> (order) -> execute -> scale -> assemble. An unsupported
// operator yields an abstained prediction; other component errors propagate.
Prediction answer_question(const QuestionRecord& question, const HybridContext& context, const Pipeline& pipeline);

}  // namespace tatqa
