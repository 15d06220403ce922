#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tatqa/corpus.hpp"
#include "tatqa/evaluation.hpp"
#include "tatqa/evidence.hpp"
#include "tatqa/operator.hpp"
#include "tatqa/reasoning.hpp"

namespace tatqa {

struct RunConfig {
  std::vector<std::filesystem::path> datasets;
  std::string split;  // train | dev | test | all, or any label
  std::string tagger = "oracle";
  std::string op = "oracle";
  std::string order = "oracle";
  std::string scale = "oracle";
  double threshold = 0.5;
  RoundingPolicy rounding;
  ScaleFactors factors;
  unsigned workers = 1;
  std::filesystem::path out;
  std::filesystem::path traces;  // defaults to <out stem>.traces.jsonl
  bool strict = false;

  // Throws UsageError for unknown component names or out-of-range settings.
  void check() const;
  ScoringOptions scoring() const { return {rounding, factors}; }
};

inline constexpr std::array<std::string_view, 2> kTaggerNames = {"oracle", "lexical"};
inline constexpr std::array<std::string_view, 2> kOperatorNames = {"oracle", "keyword"};
inline constexpr std::array<std::string_view, 2> kOrderNames = {"oracle", "positional"};
inline constexpr std::array<std::string_view, 2> kScaleNames = {"oracle", "heuristic"};

// Owns the configured components. `enabled`, when set, turns every other operator
// prediction into Other so those questions abstain.
class Components {
 public:
  explicit Components(const RunConfig& config, std::optional<std::set<Operator>> enabled = std::nullopt);
  Components(const Components&) = delete;
  Components& operator=(const Components&) = delete;
  ~Components();

  Pipeline pipeline() const;

 private:
  std::unique_ptr<Tagger> tagger_;
  std::unique_ptr<OperatorPredictor> base_op_;
  std::unique_ptr<OperatorPredictor> op_;
  std::unique_ptr<OrderDecider> order_;
  std::unique_ptr<ScalePredictor> scale_;
  double threshold_;
};

// Concatenation of the configured files.
Dataset load_datasets(const RunConfig& config, Diagnostics* diagnostics = nullptr);

// ---- validate

enum class ConsistencyStatus { Consistent, Inconsistent, ParseFailure, ExecutionFailure };
std::string_view consistency_status_name(ConsistencyStatus status);

struct ConsistencyItem {
  std::string question_id;
  std::string context_id;
  AnswerType answer_type = AnswerType::Arithmetic;
  Operator op = Operator::Other;
  std::string derivation;
  std::string gold;
  Scale gold_scale = Scale::None;
  std::optional<Rational> computed;
  ConsistencyStatus status = ConsistencyStatus::Inconsistent;
  // "face" when the computed value equals the gold number in gold units, "absolute" when
  // it equals the gold number times its scale factor
  std::string branch;
  std::string message;
  std::map<std::string, bool> policy_pass;  // policy name -> consistent under it
  // derivation writes a scale word after some operand ("38.1 billion / 125,843 million")
  bool unit_words = false;
  bool face_value_consistent = false;  // still consistent with the scale words ignored
};

struct ValidationReport {
  std::string rounding;  // policy the pass rate refers to
  std::size_t checked = 0;
  std::size_t consistent = 0;
  std::size_t face_branch = 0;
  std::size_t absolute_branch = 0;
  std::vector<ConsistencyItem> items;  // every checked question, dataset order
  std::map<std::string, std::size_t> policy_consistent;
  std::string best_policy;

  // Percent-scaled ratio questions and how many pass only through the Percent factor.
  std::size_t percent_ratio_questions = 0;
  std::size_t percent_ratio_absolute = 0;

  // Derivations with scale words on operands, and how many also pass when the operands
  // are taken at face value as the operators do.
  std::size_t unit_word_derivations = 0;
  std::size_t unit_word_face_value = 0;

  std::size_t questions = 0;
  std::size_t unlocatable = 0;
  std::vector<std::string> unlocatable_items;  // "question_id: message"
  std::vector<std::string> schema_deviations;
  std::vector<std::string> load_warnings;

  double pass_rate() const { return checked ? static_cast<double>(consistent) / static_cast<double>(checked) : 1.0; }
  double unlocatable_rate() const {
    return questions ? static_cast<double>(unlocatable) / static_cast<double>(questions) : 0.0;
  }
  std::set<std::string> consistent_ids() const;
};

inline constexpr double kMinConsistency = 0.95;

// Every Arithmetic and Counting derivation is executed and compared with its gold answer.
ValidationReport validate_dataset(const Dataset& dataset, const RoundingPolicy& rounding = {},
                                  const ScaleFactors& factors = {});
std::string format_validation(const ValidationReport& report, bool itemize = true);

// ---- stats

struct PublishedSplit {
  std::size_t contexts;
  std::size_t questions;
  double avg_rows, avg_cols, avg_paragraphs, avg_paragraph_words, avg_question_words, avg_answer_words;
};

std::optional<PublishedSplit> published_split(std::string_view split);
// [answer_type][answer_source] over all three splits combined.
const std::array<std::array<std::size_t, 3>, 4>& published_type_source();
// Percent of questions per operator, kAllOperators order.
std::optional<std::array<double, 11>> published_operator_share(std::string_view split);
// Percent of questions per scale; absent entries were not reported.
std::optional<std::array<std::optional<double>, 5>> published_scale_share(std::string_view split);

struct OperatorDistribution {
  std::array<std::size_t, 11> counts{};
  std::size_t total = 0;
  std::size_t unlocatable = 0;  // classified without span location
  double percent(Operator op) const;
};

// Gold operator per question, using the located evidence to pick Span-in-text vs
// Cell-in-table for Table-text spans.
OperatorDistribution operator_distribution(const Dataset& dataset);
Operator gold_operator(const QuestionRecord& question, const HybridContext& context);

struct StatsReport {
  std::string split;
  SplitStats split_stats;
  TypeSourceMatrix matrix;
  ScaleDistribution scales;
  OperatorDistribution operators;
};

StatsReport compute_stats(const Dataset& dataset, std::string split);
std::string format_stats(const StatsReport& report);

// ---- run / eval / ablate

struct RunResult {
  std::vector<std::pair<std::string, Prediction>> predictions;  // dataset order
  std::size_t abstained = 0;
  std::size_t errors = 0;  // component errors turned into abstentions
};

// Question-level parallelism over `config.workers` threads; results are merged in
// dataset order so output does not depend on the worker count.
RunResult run_pipeline(const Dataset& dataset, const RunConfig& config,
                       std::optional<std::set<Operator>> enabled = std::nullopt);

std::vector<std::pair<std::string, PredictionEntry>> prediction_entries(const RunResult& result);
std::string trace_line(const std::string& question_id, const Prediction& prediction, const HybridContext& context);
void write_run_outputs(const RunResult& result, const Dataset& dataset, const RunConfig& config);

// Scores in memory, without a file round trip.
EvalReport score_run(const RunResult& result, const Dataset& dataset, const ScoringOptions& options = {});

struct AblationRow {
  Operator added;
  double em = 0.0;
  double f1 = 0.0;
};

// Operators enabled cumulatively in kSupportedOperators order.
std::vector<AblationRow> ablate(const Dataset& dataset, const RunConfig& config);
std::string format_ablation(const std::vector<AblationRow>& rows);

// Supervision labels as JSON lines; unlocatable questions are listed in `skipped`.
std::string supervision_jsonl(const Dataset& dataset, std::vector<std::string>* skipped = nullptr);

}  // namespace tatqa
