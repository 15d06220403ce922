#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "tatqa/commands.hpp"
#include "tatqa/error.hpp"
#include "test_support.hpp"

using namespace tatqa;
using tatqa::testing::data_path;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("tatqa-tests-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  std::string cmd = std::string("\"") + TATQA_CLI + "\" " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig config_for(const std::string& file) {
  RunConfig c;
  c.datasets = {data_path(file)};
  c.split = "all";
  return c;
}

}  // namespace

TEST(Config, RejectsUnknownComponents) {
  RunConfig c = config_for("worked_examples.json");
  c.tagger = "neural";
  EXPECT_THROW(c.check(), UsageError);
  c = config_for("worked_examples.json");
  c.threshold = 1.5;
  EXPECT_THROW(c.check(), UsageError);
  c = config_for("worked_examples.json");
  c.workers = 0;
  EXPECT_THROW(c.check(), UsageError);
  EXPECT_NO_THROW(config_for("worked_examples.json").check());
}

TEST(Config, RepeatedIdsAcrossFilesRejected) {
  RunConfig c = config_for("worked_examples.json");
  c.datasets.push_back(data_path("worked_examples.json"));
  EXPECT_THROW(load_datasets(c), ValidationError);
}

TEST(Validate, WorkedExamplesAreConsistent) {
  Dataset data = load_datasets(config_for("worked_examples.json"));
  ValidationReport r = validate_dataset(data, RoundingPolicy::parse("gold"));
  EXPECT_GT(r.checked, 0u);
  // the conversion "38.1 billion / 125,843 million" is the one derivation with unit words,
  // and the opex ratio is written as a plain fraction of a percent-scaled answer
  EXPECT_EQ(r.unit_word_derivations, 1u);
  EXPECT_EQ(r.unit_word_face_value, 0u);
  EXPECT_EQ(r.consistent, r.checked) << format_validation(r);
  EXPECT_EQ(r.unlocatable, 0u) << format_validation(r);
}

TEST(Validate, EdgeCasesItemized) {
  Dataset data = load_datasets(config_for("edge_cases.json"));
  ValidationReport r = validate_dataset(data);
  ASSERT_EQ(r.items.size(), 4u);
  std::map<std::string, ConsistencyStatus> status;
  for (const auto& i : r.items) status[i.question_id] = i.status;
  EXPECT_EQ(status["edge-q1"], ConsistencyStatus::ExecutionFailure);
  EXPECT_EQ(status["edge-q2"], ConsistencyStatus::Inconsistent);
  EXPECT_EQ(status["edge-q3"], ConsistencyStatus::Inconsistent);
  EXPECT_EQ(status["edge-q4"], ConsistencyStatus::ParseFailure);
  EXPECT_LT(r.pass_rate(), kMinConsistency);
  std::string text = format_validation(r);
  for (const char* id : {"edge-q1", "edge-q2", "edge-q3", "edge-q4"}) EXPECT_NE(text.find(id), std::string::npos);
}

TEST(Stats, ReportShape) {
  Dataset data = load_datasets(config_for("worked_examples.json"));
  StatsReport r = compute_stats(data, "dev");
  EXPECT_EQ(r.split_stats.contexts, data.size());
  std::size_t total = 0;
  for (Operator op : kAllOperators) total += r.operators.counts[static_cast<std::size_t>(op)];
  EXPECT_EQ(total, r.operators.total);
  std::string text = format_stats(r);
  for (const char* s : {"Split statistics [dev]", "published", "Gold operator distribution", "Gold scale distribution",
                        "Change ratio", "1668"})
    EXPECT_NE(text.find(s), std::string::npos) << s;
}

TEST(Run, DeterministicAcrossWorkerCounts) {
  RunConfig c = config_for("worked_examples.json");
  c.tagger = "lexical";
  c.op = "keyword";
  c.scale = "heuristic";
  c.order = "positional";
  Dataset data = load_datasets(c);
  c.workers = 1;
  auto one = prediction_entries(run_pipeline(data, c));
  c.workers = 4;
  auto four = prediction_entries(run_pipeline(data, c));
  EXPECT_EQ(serialize_predictions(one), serialize_predictions(four));
}

TEST(Run, FileRoundTripMatchesInMemoryScore) {
  RunConfig c = config_for("worked_examples.json");
  c.out = scratch("preds.json");
  Dataset data = load_datasets(c);
  RunResult result = run_pipeline(data, c);
  write_run_outputs(result, data, c);
  EvalReport memory = score_run(result, data);
  EvalReport file = evaluate(load_predictions(c.out), data);
  EXPECT_DOUBLE_EQ(memory.em, file.em);
  EXPECT_DOUBLE_EQ(memory.f1, file.f1);

  fs::path traces = scratch("preds.traces.jsonl");
  ASSERT_TRUE(fs::exists(traces));
  std::istringstream lines(slurp(traces));
  std::size_t n = 0;
  for (std::string line; std::getline(lines, line); ++n) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("operator"));
    EXPECT_TRUE(j.contains("operands"));
  }
  EXPECT_EQ(n, result.predictions.size());
}

TEST(Ablate, CumulativeAndEndsAtFullRun) {
  RunConfig c = config_for("worked_examples.json");
  Dataset data = load_datasets(c);
  auto rows = ablate(data, c);
  ASSERT_EQ(rows.size(), kSupportedOperators.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].em, rows[i - 1].em);
    EXPECT_GE(rows[i].f1, rows[i - 1].f1);
  }
  EvalReport full = score_run(run_pipeline(data, c), data);
  EXPECT_DOUBLE_EQ(rows.back().em, full.em);
  EXPECT_DOUBLE_EQ(rows.back().f1, full.f1);
  EXPECT_NE(format_ablation(rows).find("(full)"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  std::string worked = "--dataset \"" + data_path("worked_examples.json").string() + "\"";
  std::string edge = "--dataset \"" + data_path("edge_cases.json").string() + "\"";
  std::string preds = scratch("cli-preds.json").string();
  EXPECT_EQ(cli("validate " + worked + " --rounding gold"), 0);
  EXPECT_EQ(cli("validate " + edge), 1);
  EXPECT_EQ(cli("stats " + worked), 0);
  EXPECT_EQ(cli("run " + worked + " --tagger neural --out \"" + preds + "\""), 2);
  EXPECT_EQ(cli("run " + worked + " --rounding nope --out \"" + preds + "\""), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("run " + worked + " --quiet --out \"" + preds + "\""), 0);
  EXPECT_EQ(cli("eval " + worked + " --predictions \"" + preds + "\""), 0);
  EXPECT_EQ(cli("eval " + worked + " --rounding sixish --predictions \"" + preds + "\""), 2);
  EXPECT_EQ(cli("eval " + edge + " --predictions \"" + preds + "\""), 1);  // ids unknown to the edge file
  EXPECT_EQ(cli("validate --dataset /nonexistent/file.json"), 1);
}
