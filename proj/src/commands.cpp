#include "tatqa/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tatqa/derivation.hpp"
#include "tatqa/error.hpp"

namespace tatqa {

using json = nlohmann::json;

namespace {

template <std::size_t N>
void check_name(std::string_view flag, const std::string& value, const std::array<std::string_view, N>& allowed) {
  for (auto a : allowed)
    if (a == value) return;
  std::string msg = "unknown " + std::string(flag) + " '" + value + "' (choose from";
  for (auto a : allowed) msg += " " + std::string(a);
  throw UsageError(msg + ")");
}

class RestrictedOperator final : public OperatorPredictor {
 public:
  RestrictedOperator(const OperatorPredictor& inner, std::set<Operator> enabled)
      : inner_(inner), enabled_(std::move(enabled)) {}
  Operator predict(const QuestionRecord& q, const HybridContext& ctx, const Candidates& cands) const override {
    Operator op = inner_.predict(q, ctx, cands);
    return enabled_.count(op) ? op : Operator::Other;
  }

 private:
  const OperatorPredictor& inner_;
  std::set<Operator> enabled_;
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string delta(double ours, double ref, const char* format = "%+.1f") { return fmt(format, ours - ref); }

std::string gold_text(const AnswerValue& answer) {
  auto spans = answer_strings(answer);
  std::string out;
  for (std::size_t i = 0; i < spans.size(); ++i) out += (i ? " | " : "") + spans[i];
  return out;
}

const std::vector<RoundingPolicy>& report_policies() {
  static const std::vector<RoundingPolicy> policies = {
      RoundingPolicy{RoundingPolicy::Kind::Decimals, 2}, RoundingPolicy{RoundingPolicy::Kind::Decimals, 3},
      RoundingPolicy{RoundingPolicy::Kind::Decimals, 4}, RoundingPolicy{RoundingPolicy::Kind::GoldPrecision, 4}};
  return policies;
}

// face: computed equals gold in gold units; absolute: computed equals gold x factor
std::string match_branch(const Rational& computed, const Rational& gold, Scale scale, const RoundingPolicy& rounding,
                         const ScaleFactors& factors) {
  if (numbers_match(computed, scale, gold, scale, rounding, factors)) return "face";
  if (scale != Scale::None && numbers_match(computed, Scale::None, gold, scale, rounding, factors)) return "absolute";
  return "";
}

}  // namespace

void RunConfig::check() const {
  check_name("tagger", tagger, kTaggerNames);
  check_name("operator", op, kOperatorNames);
  check_name("order", order, kOrderNames);
  check_name("scale", scale, kScaleNames);
  if (!(threshold >= 0.0 && threshold < 1.0)) throw UsageError("threshold must lie in [0, 1)");
  if (workers == 0) throw UsageError("workers must be at least 1");
}

Components::Components(const RunConfig& config, std::optional<std::set<Operator>> enabled)
    : threshold_(config.threshold) {
  config.check();
  if (config.tagger == "oracle")
    tagger_ = std::make_unique<OracleTagger>();
  else
    tagger_ = std::make_unique<LexicalTagger>();
  if (config.op == "oracle")
    base_op_ = std::make_unique<OracleOperator>();
  else
    base_op_ = std::make_unique<KeywordOperator>();
  if (enabled) op_ = std::make_unique<RestrictedOperator>(*base_op_, std::move(*enabled));
  if (config.order == "oracle")
    order_ = std::make_unique<OracleOrder>();
  else
    order_ = std::make_unique<PositionalOrder>();
  if (config.scale == "oracle")
    scale_ = std::make_unique<OracleScale>();
  else
    scale_ = std::make_unique<HeuristicScale>();
}

Components::~Components() = default;

Pipeline Components::pipeline() const {
  return Pipeline{*tagger_, op_ ? *op_ : *base_op_, *order_, *scale_, threshold_};
}

Dataset load_datasets(const RunConfig& config, Diagnostics* diagnostics) {
  if (config.datasets.empty()) throw UsageError("no --dataset given");
  Dataset all;
  LoadOptions options;
  options.strict = config.strict;
  for (const auto& path : config.datasets) {
    Dataset d = load_dataset(path, options, diagnostics);
    for (auto& e : d) all.push_back(std::move(e));
  }
  std::set<std::string> ids;
  for (const auto& e : all)
    for (const auto& q : e.questions)
      if (!ids.insert(q.question_id).second)
        throw ValidationError(q.question_id, "question id repeated across dataset files");
  return all;
}

// ---- validate

std::string_view consistency_status_name(ConsistencyStatus status) {
  switch (status) {
    case ConsistencyStatus::Consistent: return "consistent";
    case ConsistencyStatus::Inconsistent: return "inconsistent";
    case ConsistencyStatus::ParseFailure: return "parse-failure";
    case ConsistencyStatus::ExecutionFailure: return "execution-failure";
  }
  return "?";
}

std::set<std::string> ValidationReport::consistent_ids() const {
  std::set<std::string> out;
  for (const auto& item : items)
    if (item.status == ConsistencyStatus::Consistent) out.insert(item.question_id);
  return out;
}

ValidationReport validate_dataset(const Dataset& dataset, const RoundingPolicy& rounding, const ScaleFactors& factors) {
  ValidationReport report;
  report.rounding = rounding.name();
  for (const auto& p : report_policies()) report.policy_consistent[p.name()] = 0;

  for (const auto& entry : dataset) {
    for (const auto& q : entry.questions) {
      ++report.questions;
      try {
        build_supervision(q, entry.context);
      } catch (const UnlocatableEvidence& e) {
        ++report.unlocatable;
        report.unlocatable_items.push_back(e.what());
      } catch (const Error& e) {
        ++report.unlocatable;
        report.unlocatable_items.push_back(q.question_id + ": " + e.what());
      }

      if (q.answer_type != AnswerType::Arithmetic && q.answer_type != AnswerType::Counting) continue;
      ConsistencyItem item;
      item.question_id = q.question_id;
      item.context_id = entry.context.context_id;
      item.answer_type = q.answer_type;
      item.derivation = q.derivation.value_or("");
      item.gold = gold_text(q.answer);
      item.gold_scale = q.gold_scale;
      ++report.checked;

      std::optional<DerivationAst> ast;
      try {
        ast = parse_derivation(item.derivation, q.answer_type);
        item.op = classify_operator(&*ast, q.answer_type, q.answer_source, SpanLocation::Unknown);
        item.computed = eval_derivation(*ast);
      } catch (const DerivationParseError& e) {
        item.status = ConsistencyStatus::ParseFailure;
        item.message = e.what();
      } catch (const ExecutionError& e) {
        item.status = ConsistencyStatus::ExecutionFailure;
        item.message = e.what();
      }

      auto gold = answer_number(q.answer);
      if (item.computed && !gold) {
        item.message = "gold answer is not a number";
      } else if (item.computed) {
        for (const auto& p : report_policies()) {
          bool ok = !match_branch(*item.computed, *gold, q.gold_scale, p, factors).empty();
          item.policy_pass[p.name()] = ok;
          if (ok) ++report.policy_consistent[p.name()];
        }
        item.branch = match_branch(*item.computed, *gold, q.gold_scale, rounding, factors);
        if (!item.branch.empty()) {
          item.status = ConsistencyStatus::Consistent;
          ++report.consistent;
          ++(item.branch == "face" ? report.face_branch : report.absolute_branch);
        } else {
          item.message = "computed " + to_decimal_string(*item.computed, 6) + " vs gold " +
                         to_decimal_string(*gold) + (q.gold_scale == Scale::None ? "" : " " + std::string(scale_word(q.gold_scale)));
        }
        if (ast->is_expr()) {
          Expr face = ast->expr();
          for (auto& n : face.nodes) {
            if (n.kind == ExprNode::Kind::Leaf && n.unit != Scale::None) item.unit_words = true;
            n.unit = Scale::None;
          }
          if (item.unit_words) {
            ++report.unit_word_derivations;
            try {
              Rational v = eval_expr(face, face.root);
              item.face_value_consistent = !match_branch(v, *gold, q.gold_scale, rounding, factors).empty();
            } catch (const ExecutionError&) {
            }
            if (item.face_value_consistent) ++report.unit_word_face_value;
          }
        }
        if (q.gold_scale == Scale::Percent && (item.op == Operator::ChangeRatio || item.op == Operator::Division)) {
          ++report.percent_ratio_questions;
          if (item.branch == "absolute") ++report.percent_ratio_absolute;
        }
      }
      report.items.push_back(std::move(item));
    }
  }
  std::size_t best = 0;
  for (const auto& p : report_policies()) {
    std::size_t n = report.policy_consistent[p.name()];
    if (report.best_policy.empty() || n > best) {
      best = n;
      report.best_policy = p.name();
    }
  }
  return report;
}

std::string format_validation(const ValidationReport& report, bool itemize) {
  std::ostringstream out;
  auto pct = [](std::size_t n, std::size_t d) { return d ? 100.0 * static_cast<double>(n) / static_cast<double>(d) : 100.0; };
  out << "Derivation consistency (" << report.rounding << ")\n";
  out << "  checked " << report.checked << ", consistent " << report.consistent << " ("
      << fmt("%.2f", 100.0 * report.pass_rate()) << "%), threshold " << fmt("%.0f", 100.0 * kMinConsistency) << "%\n";
  out << "  matched at face value " << report.face_branch << ", through the scale factor " << report.absolute_branch
      << "\n";
  out << "  percent-scaled ratio questions " << report.percent_ratio_questions << ", consistent only with percent = 1e-2: "
      << report.percent_ratio_absolute << "\n";
  out << "  derivations with scale words on operands " << report.unit_word_derivations
      << ", also consistent at face value " << report.unit_word_face_value << "\n";
  out << "\nRounding policies\n";
  for (const auto& [name, n] : report.policy_consistent)
    out << "  " << name << std::string(name.size() < 12 ? 12 - name.size() : 1, ' ')
        << n << "/" << report.checked << " (" << fmt("%.2f", pct(n, report.checked)) << "%)"
        << (name == report.best_policy ? "  best" : "") << "\n";
  out << "\nEvidence location (unlocatable or unparsable)\n";
  out << "  questions " << report.questions << ", unlocatable " << report.unlocatable << " ("
      << fmt("%.2f", 100.0 * report.unlocatable_rate()) << "%)\n";
  out << "\nSchema deviations: " << report.schema_deviations.size() << "\n";
  for (const auto& d : report.schema_deviations) out << "  " << d << "\n";
  if (!report.load_warnings.empty()) {
    out << "\nLoad warnings: " << report.load_warnings.size() << "\n";
    for (const auto& w : report.load_warnings) out << "  " << w << "\n";
  }
  if (itemize) {
    std::size_t failures = report.checked - report.consistent;
    out << "\nFailures: " << failures << "\n";
    for (const auto& item : report.items) {
      if (item.status == ConsistencyStatus::Consistent) continue;
      out << "  " << item.question_id << " [" << consistency_status_name(item.status) << "] " << item.derivation
          << " => " << item.gold;
      if (item.gold_scale != Scale::None) out << " (" << scale_word(item.gold_scale) << ")";
      out << ": " << item.message << "\n";
    }
    out << "\nUnlocatable evidence: " << report.unlocatable_items.size() << "\n";
    for (const auto& u : report.unlocatable_items) out << "  " << u << "\n";
  }
  return out.str();
}

// ---- stats

std::optional<PublishedSplit> published_split(std::string_view split) {
  if (split == "train") return PublishedSplit{2201, 13215, 9.4, 4.0, 4.8, 43.6, 12.5, 4.1};
  if (split == "dev") return PublishedSplit{278, 1668, 9.7, 3.9, 4.9, 44.8, 12.4, 4.1};
  if (split == "test") return PublishedSplit{278, 1669, 9.3, 4.0, 4.6, 42.6, 12.4, 4.3};
  return std::nullopt;
}

const std::array<std::array<std::size_t, 3>, 4>& published_type_source() {
  static constexpr std::array<std::array<std::size_t, 3>, 4> counts = {{
      {1801, 3496, 1842},
      {777, 258, 1037},
      {106, 5, 266},
      {4747, 143, 2074},
  }};
  return counts;
}

std::optional<std::array<double, 11>> published_operator_share(std::string_view split) {
  if (split == "dev") return std::array<double, 11>{20.9, 21.1, 13.0, 3.4, 1.9, 8.5, 0.2, 1.0, 14.1, 9.3, 6.6};
  if (split == "test") return std::array<double, 11>{21.3, 21.6, 12.6, 2.5, 2.4, 5.9, 0.1, 1.0, 15.9, 10.2, 6.6};
  return std::nullopt;
}

std::optional<std::array<std::optional<double>, 5>> published_scale_share(std::string_view split) {
  if (split == "dev") return std::array<std::optional<double>, 5>{47.6, 20.7, 15.2, 0.4, 16.1};
  if (split == "test") return std::array<std::optional<double>, 5>{50.3, 19.2, 12.9, std::nullopt, 17.7};
  return std::nullopt;
}

double OperatorDistribution::percent(Operator op) const {
  return total ? 100.0 * static_cast<double>(counts[static_cast<std::size_t>(op)]) / static_cast<double>(total) : 0.0;
}

Operator gold_operator(const QuestionRecord& question, const HybridContext& context) {
  try {
    return build_supervision(question, context).g_op;
  } catch (const Error&) {
  }
  try {
    return classify_question(question);
  } catch (const Error&) {
    return Operator::Other;
  }
}

OperatorDistribution operator_distribution(const Dataset& dataset) {
  OperatorDistribution d;
  for (const auto& entry : dataset) {
    for (const auto& q : entry.questions) {
      Operator op;
      try {
        op = build_supervision(q, entry.context).g_op;
      } catch (const Error&) {
        ++d.unlocatable;
        op = gold_operator(q, entry.context);
      }
      ++d.counts[static_cast<std::size_t>(op)];
      ++d.total;
    }
  }
  return d;
}

StatsReport compute_stats(const Dataset& dataset, std::string split) {
  return {std::move(split), split_stats(dataset), type_source_matrix(dataset), scale_distribution(dataset),
          operator_distribution(dataset)};
}

std::string format_stats(const StatsReport& r) {
  std::ostringstream out;
  auto ref = published_split(r.split);
  auto line = [&](const char* label, std::string ours, std::string theirs, std::string d) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-28s %10s %10s %8s\n", label, ours.c_str(), theirs.c_str(), d.c_str());
    out << buf;
  };
  auto count_row = [&](const char* label, std::size_t ours, std::optional<std::size_t> theirs) {
    line(label, std::to_string(ours), theirs ? std::to_string(*theirs) : "-",
         theirs ? fmt("%+.0f", static_cast<double>(ours) - static_cast<double>(*theirs)) : "");
  };
  auto avg_row = [&](const char* label, double ours, std::optional<double> theirs) {
    line(label, fmt("%.2f", ours), theirs ? fmt("%.1f", *theirs) : "-", theirs ? delta(ours, *theirs, "%+.2f") : "");
  };
  out << "Split statistics [" << r.split << "]\n";
  line("", "ours", "published", "delta");
  const SplitStats& s = r.split_stats;
  count_row("hybrid contexts", s.contexts, ref ? std::optional(ref->contexts) : std::nullopt);
  count_row("questions", s.questions, ref ? std::optional(ref->questions) : std::nullopt);
  avg_row("avg rows / table", s.avg_rows, ref ? std::optional(ref->avg_rows) : std::nullopt);
  avg_row("avg cols / table", s.avg_cols, ref ? std::optional(ref->avg_cols) : std::nullopt);
  avg_row("avg paragraphs / table", s.avg_paragraphs, ref ? std::optional(ref->avg_paragraphs) : std::nullopt);
  avg_row("avg paragraph len [words]", s.avg_paragraph_words, ref ? std::optional(ref->avg_paragraph_words) : std::nullopt);
  avg_row("avg question len [words]", s.avg_question_words, ref ? std::optional(ref->avg_question_words) : std::nullopt);
  avg_row("avg answer len [words]", s.avg_answer_words, ref ? std::optional(ref->avg_answer_words) : std::nullopt);

  bool combined = r.split == "all";
  out << "\nAnswer type x source" << (combined ? " (published: all splits)" : "") << "\n";
  char buf[200];
  std::snprintf(buf, sizeof buf, "  %-12s %16s %16s %16s %16s\n", "", "Table", "Text", "Table-text", "Total");
  out << buf;
  const auto& pub = published_type_source();
  auto cell = [&](std::size_t ours, std::optional<std::size_t> theirs) {
    if (!theirs) return std::to_string(ours);
    return std::to_string(ours) + " (" + fmt("%+.0f", static_cast<double>(ours) - static_cast<double>(*theirs)) + ")";
  };
  constexpr std::array<AnswerType, 4> types = {AnswerType::Span, AnswerType::Spans, AnswerType::Counting,
                                               AnswerType::Arithmetic};
  for (AnswerType t : types) {
    auto ti = static_cast<std::size_t>(t);
    std::size_t pub_row = 0;
    for (auto v : pub[ti]) pub_row += v;
    std::vector<std::string> cols;
    for (std::size_t c = 0; c < 3; ++c)
      cols.push_back(cell(r.matrix.counts[ti][c], combined ? std::optional(pub[ti][c]) : std::nullopt));
    cols.push_back(cell(r.matrix.row_total(t), combined ? std::optional(pub_row) : std::nullopt));
    std::snprintf(buf, sizeof buf, "  %-12s %16s %16s %16s %16s\n", std::string(answer_type_name(t)).c_str(),
                  cols[0].c_str(), cols[1].c_str(), cols[2].c_str(), cols[3].c_str());
    out << buf;
  }
  {
    std::vector<std::string> cols;
    std::size_t grand = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      std::size_t pub_col = 0;
      for (std::size_t t = 0; t < 4; ++t) pub_col += pub[t][c];
      grand += pub_col;
      cols.push_back(cell(r.matrix.col_total(static_cast<AnswerSource>(c)), combined ? std::optional(pub_col) : std::nullopt));
    }
    cols.push_back(cell(r.matrix.total(), combined ? std::optional(grand) : std::nullopt));
    std::snprintf(buf, sizeof buf, "  %-12s %16s %16s %16s %16s\n", "Total", cols[0].c_str(), cols[1].c_str(),
                  cols[2].c_str(), cols[3].c_str());
    out << buf;
  }

  auto op_ref = published_operator_share(r.split);
  out << "\nGold operator distribution (%, " << r.operators.unlocatable << " questions without located evidence)\n";
  line("", "ours", "published", "delta");
  for (Operator op : kAllOperators) {
    double ours = r.operators.percent(op);
    std::optional<double> theirs;
    if (op_ref) theirs = (*op_ref)[static_cast<std::size_t>(op)];
    line(std::string(operator_name(op)).c_str(), fmt("%.1f", ours), theirs ? fmt("%.1f", *theirs) : "-",
         theirs ? delta(ours, *theirs) : "");
  }

  auto scale_ref = published_scale_share(r.split);
  out << "\nGold scale distribution (%)\n";
  line("", "ours", "published", "delta");
  for (Scale sc : kAllScales) {
    double ours = r.scales.percent(sc);
    std::optional<double> theirs;
    if (scale_ref) theirs = (*scale_ref)[static_cast<std::size_t>(sc)];
    line(std::string(scale_name(sc)).c_str(), fmt("%.1f", ours), theirs ? fmt("%.1f", *theirs) : "-",
         theirs ? delta(ours, *theirs) : "");
  }
  return out.str();
}

// ---- run / eval / ablate

RunResult run_pipeline(const Dataset& dataset, const RunConfig& config, std::optional<std::set<Operator>> enabled) {
  Components components(config, std::move(enabled));
  Pipeline pipeline = components.pipeline();

  std::vector<std::pair<const DatasetEntry*, const QuestionRecord*>> work;
  for (const auto& entry : dataset)
    for (const auto& q : entry.questions) work.emplace_back(&entry, q.question_id.empty() ? nullptr : &q);
  for (auto& w : work)
    if (!w.second) throw ValidationError(w.first->context.context_id, "question without id");

  RunResult result;
  result.predictions.resize(work.size());
  std::vector<char> failed(work.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      const auto& [entry, q] = work[i];
      Prediction p;
      try {
        p = answer_question(*q, entry->context, pipeline);
      } catch (const Error& e) {
        p = assemble_prediction(std::string(), Scale::None);
        p.abstained = true;
        p.abstain_reason = e.what();
        failed[i] = 1;
      }
      result.predictions[i] = {q->question_id, std::move(p)};
    }
  };
  unsigned n = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(std::max<std::size_t>(1, work.size()))));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (result.predictions[i].second.abstained) ++result.abstained;
    if (failed[i]) ++result.errors;
  }
  return result;
}

std::vector<std::pair<std::string, PredictionEntry>> prediction_entries(const RunResult& result) {
  std::vector<std::pair<std::string, PredictionEntry>> out;
  out.reserve(result.predictions.size());
  for (const auto& [qid, p] : result.predictions) out.emplace_back(qid, to_entry(p));
  return out;
}

std::string trace_line(const std::string& question_id, const Prediction& p, const HybridContext& context) {
  auto candidate = [&](const EvidenceCandidate& c) {
    return json{{"text", c.text}, {"probability", c.probability}, {"origin", describe(c.origin, context)}};
  };
  json j;
  j["question_id"] = question_id;
  j["operator"] = std::string(operator_key(p.trace.op));
  json cands = json::array();
  for (const auto& c : p.trace.candidates) cands.push_back(candidate(c));
  j["candidates"] = cands;
  json ops = json::array();
  for (const auto& c : p.trace.operands) ops.push_back(candidate(c));
  j["operands"] = ops;
  j["order_flag"] = p.trace.order_flag ? json(*p.trace.order_flag) : json(nullptr);
  j["operator_result"] = p.trace.operator_result ? json(to_decimal_string(*p.trace.operator_result)) : json(nullptr);
  j["percent_rescaled"] = p.trace.percent_rescaled;
  j["answer"] = p.abstained ? json(nullptr) : json(render_prediction(p));
  j["scale"] = std::string(scale_word(p.scale));
  j["abstained"] = p.abstained;
  if (p.abstained) j["abstain_reason"] = p.abstain_reason;
  return j.dump();
}

void write_run_outputs(const RunResult& result, const Dataset& dataset, const RunConfig& config) {
  if (config.out.empty()) throw UsageError("run needs --out");
  std::filesystem::path traces = config.traces;
  if (traces.empty()) {
    traces = config.out;
    traces.replace_extension(".traces.jsonl");
  }
  {
    std::ofstream out(config.out, std::ios::binary);
    if (!out) throw Error("cannot write " + config.out.string());
    out << serialize_predictions(prediction_entries(result));
  }
  std::map<std::string, const HybridContext*> context_of;
  for (const auto& e : dataset)
    for (const auto& q : e.questions) context_of[q.question_id] = &e.context;
  std::ofstream out(traces, std::ios::binary);
  if (!out) throw Error("cannot write " + traces.string());
  for (const auto& [qid, p] : result.predictions) out << trace_line(qid, p, *context_of.at(qid)) << "\n";
}

EvalReport score_run(const RunResult& result, const Dataset& dataset, const ScoringOptions& options) {
  PredictionMap map;
  for (const auto& [qid, p] : result.predictions) map.emplace(qid, to_entry(p));
  return evaluate(map, dataset, options);
}

std::vector<AblationRow> ablate(const Dataset& dataset, const RunConfig& config) {
  std::vector<AblationRow> rows;
  std::set<Operator> enabled;
  for (Operator op : kSupportedOperators) {
    enabled.insert(op);
    RunResult run = run_pipeline(dataset, config, enabled);
    EvalReport report = score_run(run, dataset, config.scoring());
    rows.push_back({op, report.em, report.f1});
  }
  return rows;
}

std::string format_ablation(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-22s %8s %8s\n", "Operators", "EM", "F1");
  out << buf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string label = "+ " + std::string(operator_name(rows[i].added));
    if (i + 1 == rows.size()) label += " (full)";
    std::snprintf(buf, sizeof buf, "%-22s %8.2f %8.2f\n", label.c_str(), rows[i].em, rows[i].f1);
    out << buf;
  }
  return out.str();
}

std::string supervision_jsonl(const Dataset& dataset, std::vector<std::string>* skipped) {
  std::string out;
  for (const auto& entry : dataset) {
    for (const auto& q : entry.questions) {
      try {
        out += supervision_to_json_line(q, entry.context, build_supervision(q, entry.context)) + "\n";
      } catch (const Error& e) {
        if (skipped) skipped->push_back(q.question_id + ": " + e.what());
      }
    }
  }
  return out;
}

}  // namespace tatqa
