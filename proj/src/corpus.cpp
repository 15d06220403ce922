#include "tatqa/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tatqa/error.hpp"
#include "tatqa/text.hpp"
#include "text_util.hpp"

namespace tatqa {

using nlohmann::json;

namespace {

const std::set<std::string> kContextFields = {"table", "paragraphs", "questions"};
const std::set<std::string> kTableFields = {"uid", "table"};
const std::set<std::string> kParagraphFields = {"uid", "order", "text"};
const std::set<std::string> kQuestionFields = {"uid",         "order",       "question",
                                               "answer",      "derivation",  "answer_type",
                                               "answer_from", "rel_paragraphs", "req_comparison",
                                               "scale"};
// Release fields that the data model does not hold; kept as extras without complaint.
const std::set<std::string> kQuestionPassThrough = {"rel_paragraphs", "req_comparison"};

std::string kind_of(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return "null";
    case json::value_t::boolean: return "boolean";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return "integer";
    case json::value_t::number_float: return "float";
    case json::value_t::string: return "string";
    case json::value_t::array: return "array";
    case json::value_t::object: return "object";
    default: return "other";
  }
}

class Reader {
 public:
  Reader(const LoadOptions& options, Diagnostics* diagnostics)
      : options_(options), diagnostics_(diagnostics) {}

  Dataset read(const json& root) {
    if (!root.is_array()) throw ParseError("$", "expected a top-level array of contexts");
    Dataset out;
    out.reserve(root.size());
    for (std::size_t i = 0; i < root.size(); ++i) out.push_back(read_entry(root[i], "[" + std::to_string(i) + "]"));
    std::set<std::string> seen_questions;
    for (const auto& e : out)
      for (const auto& q : e.questions)
        if (!seen_questions.insert(q.question_id).second)
          throw ValidationError(q.question_id, "question id appears more than once");
    return out;
  }

 private:
  void warn(std::string message) {
    if (diagnostics_) diagnostics_->warnings.push_back(std::move(message));
  }

  void deviation(const std::string& path, const std::string& message) {
    if (options_.strict) throw ParseError(path, message);
    warn(path + ": " + message);
  }

  const json& require(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path, "missing field '" + key + "'");
    return *it;
  }

  std::string require_string(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() && !options_.strict) return v.dump();
    throw ParseError(path + "." + key, "expected a string, found " + kind_of(v));
  }

  std::map<std::string, std::string> extras(const json& obj, const std::set<std::string>& known,
                                            const std::set<std::string>& pass_through,
                                            const std::string& path) {
    std::map<std::string, std::string> out;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (known.count(it.key()) && !pass_through.count(it.key())) continue;
      if (!known.count(it.key())) deviation(path + "." + it.key(), "unknown field");
      out[it.key()] = it.value().dump();
    }
    return out;
  }

  DatasetEntry read_entry(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    DatasetEntry entry;
    entry.extra_fields = extras(obj, kContextFields, {}, path);

    const json& table = require(obj, "table", path);
    if (!table.is_object()) throw ParseError(path + ".table", "expected an object");
    for (auto it = table.begin(); it != table.end(); ++it)
      if (!kTableFields.count(it.key())) deviation(path + ".table." + it.key(), "unknown field");
    std::string table_id = require_string(table, "uid", path + ".table");
    entry.context.context_id = table_id;
    const json& grid = require(table, "table", path + ".table");
    if (!grid.is_array()) throw ParseError(path + ".table.table", "expected an array of rows");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < grid.size(); ++r) {
      const json& row = grid[r];
      std::string rpath = path + ".table.table[" + std::to_string(r) + "]";
      if (!row.is_array()) throw ParseError(rpath, "expected an array of cells");
      std::vector<std::string> cells;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (row[c].is_string()) {
          cells.push_back(row[c].get<std::string>());
        } else if (!options_.strict && (row[c].is_number() || row[c].is_null())) {
          cells.push_back(row[c].is_null() ? "" : row[c].dump());
        } else {
          throw ParseError(rpath + "[" + std::to_string(c) + "]", "expected a string cell");
        }
      }
      rows.push_back(std::move(cells));
    }
    entry.context.table = make_table(table_id, rows);
    const Table& t = entry.context.table;
    if (t.n_rows < 3 || t.n_rows > 30 || t.n_cols < 3 || t.n_cols > 6)
      warn(table_id + ": table is " + std::to_string(t.n_rows) + "x" + std::to_string(t.n_cols) +
           ", outside 3-30 rows / 3-6 columns");

    const json& paragraphs = require(obj, "paragraphs", path);
    if (!paragraphs.is_array()) throw ParseError(path + ".paragraphs", "expected an array");
    std::set<int> orders;
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
      const json& p = paragraphs[i];
      std::string ppath = path + ".paragraphs[" + std::to_string(i) + "]";
      if (!p.is_object()) throw ParseError(ppath, "expected an object");
      for (auto it = p.begin(); it != p.end(); ++it)
        if (!kParagraphFields.count(it.key())) deviation(ppath + "." + it.key(), "unknown field");
      Paragraph para;
      para.paragraph_id = require_string(p, "uid", ppath);
      para.text = require_string(p, "text", ppath);
      para.order = read_order(p, ppath, static_cast<int>(i) + 1);
      if (!orders.insert(para.order).second)
        throw ValidationError(table_id, "duplicate paragraph order " + std::to_string(para.order));
      entry.context.paragraphs.push_back(std::move(para));
    }
    std::stable_sort(entry.context.paragraphs.begin(), entry.context.paragraphs.end(),
                     [](const Paragraph& a, const Paragraph& b) { return a.order < b.order; });
    if (entry.context.paragraphs.size() < 2)
      throw ValidationError(table_id, "a hybrid context needs at least two paragraphs, found " +
                                          std::to_string(entry.context.paragraphs.size()));

    const json& questions = require(obj, "questions", path);
    if (!questions.is_array()) throw ParseError(path + ".questions", "expected an array");
    for (std::size_t i = 0; i < questions.size(); ++i)
      entry.questions.push_back(
          read_question(questions[i], path + ".questions[" + std::to_string(i) + "]", static_cast<int>(i) + 1));
    return entry;
  }

  int read_order(const json& obj, const std::string& path, int fallback) {
    auto it = obj.find("order");
    if (it == obj.end()) {
      deviation(path, "missing field 'order'");
      return fallback;
    }
    if (it->is_number_integer()) return it->get<int>();
    if (!options_.strict && it->is_string()) {
      try {
        return std::stoi(it->get<std::string>());
      } catch (const std::exception&) {
      }
    }
    throw ParseError(path + ".order", "expected an integer");
  }

  AnswerValue read_answer(const json& v, AnswerType type, const std::string& path) {
    if (v.is_number_integer() || v.is_number_unsigned()) {
      if (options_.strict && (type == AnswerType::Span || type == AnswerType::Spans))
        throw ParseError(path, "numeric answer for a span question");
      return Rational(v.is_number_unsigned() ? BigInt(v.get<std::uint64_t>()) : BigInt(v.get<std::int64_t>()));
    }
    if (v.is_number_float()) {
      if (options_.strict && (type == AnswerType::Span || type == AnswerType::Spans))
        throw ParseError(path, "numeric answer for a span question");
      return rational_from_double(v.get<double>());
    }
    if (v.is_string()) {
      if (options_.strict && type == AnswerType::Spans)
        throw ParseError(path, "multi-span answer must be a list");
      return v.get<std::string>();
    }
    if (v.is_array()) {
      if (options_.strict && (type == AnswerType::Arithmetic))
        throw ParseError(path, "arithmetic answer must be a number");
      std::vector<std::string> items;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_string())
          items.push_back(v[i].get<std::string>());
        else if (!options_.strict && v[i].is_number())
          items.push_back(v[i].dump());
        else
          throw ParseError(path + "[" + std::to_string(i) + "]", "expected a string answer item");
      }
      if (items.empty()) throw ParseError(path, "empty answer list");
      return items;
    }
    throw ParseError(path, "unsupported answer kind " + kind_of(v));
  }

  QuestionRecord read_question(const json& obj, const std::string& path, int fallback_order) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    QuestionRecord q;
    q.extra_fields = extras(obj, kQuestionFields, kQuestionPassThrough, path);
    q.question_id = require_string(obj, "uid", path);
    q.order = read_order(obj, path, fallback_order);
    q.text = require_string(obj, "question", path);

    std::string type_text = require_string(obj, "answer_type", path);
    auto type = parse_answer_type(type_text);
    if (!type) throw ValidationError(q.question_id, "unknown answer_type '" + type_text + "'");
    q.answer_type = *type;
    std::string source_text = require_string(obj, "answer_from", path);
    auto source = parse_answer_source(source_text);
    if (!source) throw ValidationError(q.question_id, "unknown answer_from '" + source_text + "'");
    q.answer_source = *source;

    q.answer = read_answer(require(obj, "answer", path), q.answer_type, path + ".answer");

    auto scale_it = obj.find("scale");
    if (scale_it == obj.end()) {
      deviation(path, "missing field 'scale'");
    } else {
      if (!scale_it->is_string()) throw ParseError(path + ".scale", "expected a string");
      auto scale = parse_scale(scale_it->get<std::string>());
      if (!scale) throw ValidationError(q.question_id, "unknown scale '" + scale_it->get<std::string>() + "'");
      q.gold_scale = *scale;
    }

    auto der_it = obj.find("derivation");
    if (der_it == obj.end()) {
      deviation(path, "missing field 'derivation'");
    } else if (der_it->is_string()) {
      std::string d = der_it->get<std::string>();
      if (!detail::trim(d).empty()) q.derivation = d;
    } else if (!der_it->is_null() || options_.strict) {
      throw ParseError(path + ".derivation", "expected a string");
    }
    if ((q.answer_type == AnswerType::Counting || q.answer_type == AnswerType::Arithmetic) && !q.derivation)
      throw ValidationError(q.question_id, std::string(answer_type_name(q.answer_type)) +
                                               " question without a derivation");
    return q;
  }

  const LoadOptions& options_;
  Diagnostics* diagnostics_;
};

json answer_to_json(const AnswerValue& a) {
  if (auto s = std::get_if<std::string>(&a)) return *s;
  if (auto l = std::get_if<std::vector<std::string>>(&a)) return *l;
  const Rational& r = std::get<Rational>(a);
  if (boost::multiprecision::denominator(r) == 1) {
    BigInt n = boost::multiprecision::numerator(r);
    if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max())
      return n.convert_to<std::int64_t>();
  }
  return to_double(r);
}

std::string read_file(const std::filesystem::path& path) {
  try {
    return detail::read_file(path);
  } catch (const std::runtime_error& e) {
    throw Error(e.what());
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("$", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string_view answer_type_word(AnswerType type) {
  switch (type) {
    case AnswerType::Span: return "span";
    case AnswerType::Spans: return "multi-span";
    case AnswerType::Counting: return "count";
    case AnswerType::Arithmetic: return "arithmetic";
  }
  return "span";
}

std::string_view answer_type_name(AnswerType type) {
  switch (type) {
    case AnswerType::Span: return "Span";
    case AnswerType::Spans: return "Spans";
    case AnswerType::Counting: return "Counting";
    case AnswerType::Arithmetic: return "Arithmetic";
  }
  return "Span";
}

std::optional<AnswerType> parse_answer_type(std::string_view text) {
  std::string t = detail::to_lower(detail::trim(text));
  if (t == "span") return AnswerType::Span;
  if (t == "multi-span" || t == "spans" || t == "multi_span") return AnswerType::Spans;
  if (t == "count" || t == "counting") return AnswerType::Counting;
  if (t == "arithmetic") return AnswerType::Arithmetic;
  return std::nullopt;
}

std::string_view answer_source_word(AnswerSource source) {
  switch (source) {
    case AnswerSource::Table: return "table";
    case AnswerSource::Text: return "text";
    case AnswerSource::TableText: return "table-text";
  }
  return "text";
}

std::string_view answer_source_name(AnswerSource source) {
  switch (source) {
    case AnswerSource::Table: return "Table";
    case AnswerSource::Text: return "Text";
    case AnswerSource::TableText: return "Table-text";
  }
  return "Text";
}

std::optional<AnswerSource> parse_answer_source(std::string_view text) {
  std::string t = detail::to_lower(detail::trim(text));
  if (t == "table") return AnswerSource::Table;
  if (t == "text") return AnswerSource::Text;
  if (t == "table-text" || t == "tabletext" || t == "table_text") return AnswerSource::TableText;
  return std::nullopt;
}

Table make_table(std::string table_id, const std::vector<std::vector<std::string>>& rows) {
  Table t;
  t.table_id = std::move(table_id);
  if (rows.empty() || rows.front().empty()) throw ValidationError(t.table_id, "empty table");
  t.n_rows = rows.size();
  t.n_cols = rows.front().size();
  t.cells.reserve(t.n_rows * t.n_cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != t.n_cols)
      throw ValidationError(t.table_id, "ragged table: row " + std::to_string(r) + " has " +
                                            std::to_string(rows[r].size()) + " cells, expected " +
                                            std::to_string(t.n_cols));
    for (std::size_t c = 0; c < t.n_cols; ++c) {
      Cell cell;
      cell.text = rows[r][c];
      cell.row = r;
      cell.col = c;
      cell.numeric = parse_number(cell.text);
      t.cells.push_back(std::move(cell));
    }
  }
  return t;
}

std::vector<std::string> answer_strings(const AnswerValue& answer) {
  if (auto s = std::get_if<std::string>(&answer)) return {*s};
  if (auto l = std::get_if<std::vector<std::string>>(&answer)) return *l;
  return {to_decimal_string(std::get<Rational>(answer))};
}

std::optional<Rational> answer_number(const AnswerValue& answer) {
  if (auto r = std::get_if<Rational>(&answer)) return *r;
  auto strings = answer_strings(answer);
  if (strings.size() != 1) return std::nullopt;
  if (auto p = parse_number(strings.front())) return p->value;
  return std::nullopt;
}

Dataset parse_dataset(std::string_view json_text, const LoadOptions& options, Diagnostics* diagnostics) {
  json root = parse_json(json_text);
  return Reader(options, diagnostics).read(root);
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options, Diagnostics* diagnostics) {
  return parse_dataset(read_file(path), options, diagnostics);
}

std::string serialize_dataset(const Dataset& dataset) {
  json root = json::array();
  for (const auto& entry : dataset) {
    json obj = json::object();
    for (const auto& [k, v] : entry.extra_fields) obj[k] = json::parse(v);
    json grid = json::array();
    const Table& t = entry.context.table;
    for (std::size_t r = 0; r < t.n_rows; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < t.n_cols; ++c) row.push_back(t.at(r, c).text);
      grid.push_back(std::move(row));
    }
    obj["table"] = {{"uid", entry.context.context_id}, {"table", std::move(grid)}};
    json paragraphs = json::array();
    for (const auto& p : entry.context.paragraphs)
      paragraphs.push_back({{"uid", p.paragraph_id}, {"order", p.order}, {"text", p.text}});
    obj["paragraphs"] = std::move(paragraphs);
    json questions = json::array();
    for (const auto& q : entry.questions) {
      json jq = json::object();
      for (const auto& [k, v] : q.extra_fields) jq[k] = json::parse(v);
      jq["uid"] = q.question_id;
      jq["order"] = q.order;
      jq["question"] = q.text;
      jq["answer"] = answer_to_json(q.answer);
      jq["derivation"] = q.derivation.value_or("");
      jq["answer_type"] = std::string(answer_type_word(q.answer_type));
      jq["answer_from"] = std::string(answer_source_word(q.answer_source));
      jq["scale"] = std::string(scale_word(q.gold_scale));
      questions.push_back(std::move(jq));
    }
    obj["questions"] = std::move(questions);
    root.push_back(std::move(obj));
  }
  return root.dump(2);
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_dataset(dataset) << '\n';
}

std::size_t question_count(const Dataset& dataset) {
  std::size_t n = 0;
  for (const auto& e : dataset) n += e.questions.size();
  return n;
}

SchemaReport schema_report(std::string_view json_text) {
  json root = parse_json(json_text);
  SchemaReport report;
  auto visit = [&](const std::string& level, const json& obj, const std::set<std::string>& expected,
                   const std::string& path) {
    FieldInventory& inv = report.levels[level];
    ++inv.records;
    if (!obj.is_object()) {
      report.deviations.push_back(path + ": not an object");
      return;
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      ++inv.field_counts[it.key()];
      ++inv.field_kinds[it.key()][kind_of(it.value())];
    }
    for (const auto& f : expected)
      if (!obj.contains(f)) report.deviations.push_back(path + ": missing '" + f + "'");
  };
  if (!root.is_array()) {
    report.deviations.push_back("$: top level is not an array");
    return report;
  }
  for (std::size_t i = 0; i < root.size(); ++i) {
    std::string path = "[" + std::to_string(i) + "]";
    const json& ctx = root[i];
    visit("context", ctx, kContextFields, path);
    if (!ctx.is_object()) continue;
    if (ctx.contains("table")) visit("table", ctx["table"], kTableFields, path + ".table");
    if (ctx.contains("paragraphs") && ctx["paragraphs"].is_array())
      for (std::size_t p = 0; p < ctx["paragraphs"].size(); ++p)
        visit("paragraph", ctx["paragraphs"][p], kParagraphFields,
              path + ".paragraphs[" + std::to_string(p) + "]");
    if (ctx.contains("questions") && ctx["questions"].is_array())
      for (std::size_t q = 0; q < ctx["questions"].size(); ++q)
        visit("question", ctx["questions"][q],
              {"uid", "order", "question", "answer", "derivation", "answer_type", "answer_from", "scale"},
              path + ".questions[" + std::to_string(q) + "]");
  }
  const std::map<std::string, const std::set<std::string>*> known = {
      {"context", &kContextFields}, {"table", &kTableFields},
      {"paragraph", &kParagraphFields}, {"question", &kQuestionFields}};
  for (const auto& [level, inv] : report.levels)
    for (const auto& [field, count] : inv.field_counts)
      if (!known.at(level)->count(field))
        report.deviations.push_back(level + ": unknown field '" + field + "' in " + std::to_string(count) +
                                    " record(s)");
  return report;
}

std::string format_schema_report(const SchemaReport& report) {
  std::ostringstream out;
  for (const char* level : {"context", "table", "paragraph", "question"}) {
    auto it = report.levels.find(level);
    if (it == report.levels.end()) continue;
    const FieldInventory& inv = it->second;
    out << level << " (" << inv.records << " records)\n";
    for (const auto& [field, count] : inv.field_counts) {
      out << "  " << field << ": " << count;
      out << " [";
      bool first = true;
      for (const auto& [kind, n] : inv.field_kinds.at(field)) {
        out << (first ? "" : ", ") << kind << "=" << n;
        first = false;
      }
      out << "]\n";
    }
  }
  out << "deviations: " << report.deviations.size() << "\n";
  for (const auto& d : report.deviations) out << "  " << d << "\n";
  return out.str();
}

SplitStats split_stats(const Dataset& dataset) {
  SplitStats s;
  s.contexts = dataset.size();
  std::size_t rows = 0, cols = 0, paragraphs = 0, paragraph_words = 0, question_words = 0, answer_words = 0;
  for (const auto& e : dataset) {
    rows += e.context.table.n_rows;
    cols += e.context.table.n_cols;
    paragraphs += e.context.paragraphs.size();
    for (const auto& p : e.context.paragraphs) paragraph_words += word_count(p.text);
    for (const auto& q : e.questions) {
      ++s.questions;
      question_words += word_count(q.text);
      for (const auto& a : answer_strings(q.answer)) answer_words += word_count(a);
    }
  }
  auto avg = [](std::size_t num, std::size_t den) { return den ? static_cast<double>(num) / den : 0.0; };
  s.avg_rows = avg(rows, s.contexts);
  s.avg_cols = avg(cols, s.contexts);
  s.avg_paragraphs = avg(paragraphs, s.contexts);
  s.avg_paragraph_words = avg(paragraph_words, paragraphs);
  s.avg_question_words = avg(question_words, s.questions);
  s.avg_answer_words = avg(answer_words, s.questions);
  return s;
}

std::size_t TypeSourceMatrix::row_total(AnswerType type) const {
  std::size_t n = 0;
  for (auto v : counts[static_cast<std::size_t>(type)]) n += v;
  return n;
}

std::size_t TypeSourceMatrix::col_total(AnswerSource source) const {
  std::size_t n = 0;
  for (const auto& row : counts) n += row[static_cast<std::size_t>(source)];
  return n;
}

std::size_t TypeSourceMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (auto v : row) n += v;
  return n;
}

TypeSourceMatrix type_source_matrix(const Dataset& dataset) {
  TypeSourceMatrix m;
  for (const auto& e : dataset)
    for (const auto& q : e.questions)
      ++m.counts[static_cast<std::size_t>(q.answer_type)][static_cast<std::size_t>(q.answer_source)];
  return m;
}

double ScaleDistribution::percent(Scale scale) const {
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(counts[static_cast<std::size_t>(scale)]) / static_cast<double>(total);
}

ScaleDistribution scale_distribution(const Dataset& dataset) {
  ScaleDistribution d;
  for (const auto& e : dataset)
    for (const auto& q : e.questions) {
      ++d.counts[static_cast<std::size_t>(q.gold_scale)];
      ++d.total;
    }
  return d;
}

}  // namespace tatqa
