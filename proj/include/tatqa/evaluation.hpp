#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tatqa/corpus.hpp"
#include "tatqa/numerics.hpp"
#include "tatqa/reasoning.hpp"

namespace tatqa {

// Drop reproduces the published DROP evaluator, which splits on hyphens and so drops
// the minus sign. SignAware keeps a leading minus on numbers.
enum class MetricMode { Drop, SignAware };

// Python float() acceptance and str(float) formatting, as used by the DROP normalizer.
std::optional<double> python_float(std::string_view text);
std::string python_float_repr(double value);
// Python round(value, 2).
double python_round2(double value);

std::string normalize_answer(std::string_view text, MetricMode mode = MetricMode::SignAware);
std::set<std::string> token_bag(std::string_view text, MetricMode mode = MetricMode::SignAware);

double bag_f1(const std::set<std::string>& predicted, const std::set<std::string>& gold);

// Optimal one-to-one alignment of gold and predicted bags. Entry i is the F1 credited to
// gold bag i (trailing zeros pad to max(#gold, #predicted)).
std::vector<double> align_bags(const std::vector<std::set<std::string>>& predicted,
                               const std::vector<std::set<std::string>>& gold);

// Maximum-weight assignment on a rows x cols matrix; returns the column for each row
// (or -1 when rows > cols).
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

struct MetricScore {
  double em = 0.0;
  double f1 = 0.0;
};

// The DROP get_metrics computation for bags of spans.
MetricScore drop_metrics(const std::vector<std::string>& predicted, const std::vector<std::string>& gold,
                         MetricMode mode = MetricMode::SignAware);

struct RoundingPolicy {
  enum class Kind {
    Decimals,       // both sides rounded to `places` decimals after scale application
    GoldPrecision,  // prediction, in gold scale units, rounded to the gold's own decimals
  };
  Kind kind = Kind::Decimals;
  int places = 4;

  // "4", "decimals:4" or "gold"
  static RoundingPolicy parse(std::string_view text);
  std::string name() const;
};

bool numbers_match(const Rational& predicted, Scale predicted_scale, const Rational& gold, Scale gold_scale,
                   const RoundingPolicy& rounding = {}, const ScaleFactors& factors = {});

struct ScoringOptions {
  RoundingPolicy rounding;
  ScaleFactors factors;
};

struct PredictionEntry {
  AnswerValue answer;
  Scale scale = Scale::None;
  bool abstained = false;
};

PredictionEntry to_entry(const Prediction& prediction);

// Numeric golds score 1/1 only when predicted value x scale equals gold value x scale;
// string golds use sign-aware DROP F1 with the scale word attached to each span.
MetricScore score_question(const PredictionEntry& prediction, const QuestionRecord& gold,
                           const ScoringOptions& options = {});
MetricScore score_question(const Prediction& prediction, const QuestionRecord& gold,
                           const ScoringOptions& options = {});

using PredictionMap = std::map<std::string, PredictionEntry>;

// {"question_id": [answer, "scale"], ...}. Throws ParseError, including on duplicate ids.
PredictionMap parse_predictions(std::string_view json_text);
PredictionMap load_predictions(const std::filesystem::path& path);
std::string serialize_predictions(const std::vector<std::pair<std::string, PredictionEntry>>& predictions);

struct QuestionScore {
  std::string question_id;
  AnswerType answer_type = AnswerType::Span;
  AnswerSource answer_source = AnswerSource::Text;
  double em = 0.0;
  double f1 = 0.0;
  bool missing = false;
};

struct CellScore {
  std::size_t count = 0;
  double em_sum = 0.0;
  double f1_sum = 0.0;

  void add(double em, double f1) {
    ++count;
    em_sum += em;
    f1_sum += f1;
  }
  // percentages; 0 for an empty cell
  double em() const { return count ? 100.0 * em_sum / static_cast<double>(count) : 0.0; }
  double f1() const { return count ? 100.0 * f1_sum / static_cast<double>(count) : 0.0; }
};

struct EvalReport {
  double em = 0.0;  // percent, micro-averaged
  double f1 = 0.0;
  CellScore overall;
  std::array<std::array<CellScore, 3>, 4> cells{};  // [answer_type][answer_source]
  std::array<CellScore, 4> by_type{};
  std::array<CellScore, 3> by_source{};
  std::vector<QuestionScore> records;  // gold order
  std::size_t missing = 0;
  std::vector<std::string> unknown_ids;  // predicted ids absent from the gold data
};

// Every gold question is scored; questions without a prediction count as (0,0).
EvalReport evaluate(const PredictionMap& predictions, const Dataset& gold, const ScoringOptions& options = {});

// Throws ScoringError when `question_id` is not a gold question.
MetricScore score_by_id(const PredictionMap& predictions, const Dataset& gold, const std::string& question_id,
                        const ScoringOptions& options = {});

// Answer-type x answer-source grid of EM/F1 with margins.
std::string format_report(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace tatqa
