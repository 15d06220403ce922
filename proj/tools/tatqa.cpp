// tatqa: validate, stats, run, eval, ablate over table+text QA data.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tatqa/commands.hpp"
#include "tatqa/error.hpp"

namespace fs = std::filesystem;
using namespace tatqa;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Options {
  std::vector<std::string> datasets;
  std::string split;
  std::string tagger = "oracle", op = "oracle", order = "oracle", scale = "oracle";
  double threshold = 0.5;
  std::string rounding = "decimals:4";
  unsigned workers = 1;
  std::string out;
  std::string traces;
  std::string predictions;
  bool strict = false;
  bool quiet = false;
};

std::string infer_split(const Options& o) {
  if (!o.split.empty()) return o.split;
  if (o.datasets.size() != 1) return "all";
  std::string name = fs::path(o.datasets.front()).filename().string();
  for (const char* s : {"train", "dev", "test"})
    if (name.find(s) != std::string::npos) return s;
  return "all";
}

RunConfig make_config(const Options& o) {
  RunConfig c;
  for (const auto& d : o.datasets) c.datasets.emplace_back(d);
  c.split = infer_split(o);
  c.tagger = o.tagger;
  c.op = o.op;
  c.order = o.order;
  c.scale = o.scale;
  c.threshold = o.threshold;
  c.rounding = RoundingPolicy::parse(o.rounding);
  c.workers = o.workers;
  c.out = o.out;
  c.traces = o.traces;
  c.strict = o.strict;
  c.check();
  return c;
}

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void add_dataset(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.datasets, "dataset JSON file (repeatable)")->required();
  cmd->add_option("--split", o.split, "split label: train, dev, test or all");
  cmd->add_flag("--strict", o.strict, "reject schema deviations instead of warning");
}

void add_components(CLI::App* cmd, Options& o) {
  cmd->add_option("--tagger", o.tagger, "oracle|lexical");
  cmd->add_option("--operator", o.op, "oracle|keyword");
  cmd->add_option("--order", o.order, "oracle|positional");
  cmd->add_option("--scale", o.scale, "oracle|heuristic");
  cmd->add_option("--threshold", o.threshold, "tag probability threshold");
  cmd->add_option("--workers", o.workers, "worker threads");
}

void add_rounding(CLI::App* cmd, Options& o) {
  cmd->add_option("--rounding", o.rounding, "decimals:N or gold");
}

int cmd_validate(const Options& o) {
  RunConfig c = make_config(o);
  Diagnostics diag;
  Dataset data = load_datasets(c, &diag);
  ValidationReport report = validate_dataset(data, c.rounding, c.factors);
  report.load_warnings = diag.warnings;
  for (const auto& path : c.datasets) {
    std::ifstream in(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (auto& d : schema_report(text).deviations) report.schema_deviations.push_back(path.string() + ": " + d);
  }
  write_or_print(format_validation(report), o.out);
  return report.pass_rate() >= kMinConsistency ? kOk : kFailure;
}

int cmd_stats(const Options& o) {
  RunConfig c = make_config(o);
  Dataset data = load_datasets(c);
  write_or_print(format_stats(compute_stats(data, c.split)), o.out);
  return kOk;
}

int cmd_run(const Options& o) {
  RunConfig c = make_config(o);
  if (c.out.empty()) throw UsageError("run needs --out");
  Dataset data = load_datasets(c);
  RunResult result = run_pipeline(data, c);
  write_run_outputs(result, data, c);
  if (!o.quiet)
    std::cerr << "answered " << result.predictions.size() << " questions, abstained " << result.abstained
              << " (component errors " << result.errors << ")\n";
  return kOk;
}

int cmd_eval(const Options& o) {
  RunConfig c = make_config(o);
  if (o.predictions.empty()) throw UsageError("eval needs --predictions");
  Dataset data = load_datasets(c);
  PredictionMap preds = load_predictions(o.predictions);
  EvalReport report = evaluate(preds, data, c.scoring());
  std::cout << format_report(report);
  if (!o.out.empty()) write_or_print(report_to_json(report), o.out);
  if (!report.unknown_ids.empty()) {
    std::cerr << "predictions for " << report.unknown_ids.size() << " unknown question ids:\n";
    for (const auto& id : report.unknown_ids) std::cerr << "  " << id << "\n";
    return kFailure;
  }
  return kOk;
}

int cmd_ablate(const Options& o) {
  RunConfig c = make_config(o);
  Dataset data = load_datasets(c);
  write_or_print(format_ablation(ablate(data, c)), o.out);
  return kOk;
}

int cmd_schema(const Options& o) {
  std::string all;
  for (const auto& path : o.datasets) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    all += "== " + path + "\n" + format_schema_report(schema_report(text));
  }
  write_or_print(all, o.out);
  return kOk;
}

int cmd_supervise(const Options& o) {
  RunConfig c = make_config(o);
  Dataset data = load_datasets(c);
  std::vector<std::string> skipped;
  write_or_print(supervision_jsonl(data, &skipped), o.out);
  std::cerr << "skipped " << skipped.size() << " questions with unlocatable evidence\n";
  for (const auto& s : skipped) std::cerr << "  " << s << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic question answering over financial tables and text"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "execute gold derivations and check them against gold answers");
  add_dataset(validate, o);
  add_rounding(validate, o);
  validate->add_option("--out", o.out, "write the report here instead of stdout");

  auto* stats = app.add_subcommand("stats", "split statistics and gold distributions with published deltas");
  add_dataset(stats, o);
  stats->add_option("--out", o.out, "write the report here instead of stdout");

  auto* run = app.add_subcommand("run", "answer every question with the configured components");
  add_dataset(run, o);
  add_components(run, o);
  run->add_option("--out", o.out, "predictions file")->required();
  run->add_option("--traces", o.traces, "trace file (default: next to the predictions)");
  run->add_flag("--quiet", o.quiet);

  auto* eval = app.add_subcommand("eval", "score a predictions file against gold answers");
  add_dataset(eval, o);
  add_rounding(eval, o);
  eval->add_option("--predictions", o.predictions, "predictions file")->required();
  eval->add_option("--out", o.out, "also write a JSON report here");

  auto* abl = app.add_subcommand("ablate", "cumulative operator ablation");
  add_dataset(abl, o);
  add_components(abl, o);
  add_rounding(abl, o);
  abl->add_option("--out", o.out, "write the table here instead of stdout");

  auto* schema = app.add_subcommand("schema", "field inventory of a dataset file");
  schema->add_option("--dataset", o.datasets, "dataset JSON file (repeatable)")->required();
  schema->add_option("--out", o.out, "write the report here instead of stdout");

  auto* supervise = app.add_subcommand("supervise", "export supervision labels as JSON lines");
  add_dataset(supervise, o);
  supervise->add_option("--out", o.out, "write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*stats) return cmd_stats(o);
    if (*run) return cmd_run(o);
    if (*eval) return cmd_eval(o);
    if (*abl) return cmd_ablate(o);
    if (*schema) return cmd_schema(o);
    if (*supervise) return cmd_supervise(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
