#include "tatqa/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tatqa/error.hpp"
#include "tatqa/text.hpp"
#include "text_util.hpp"

namespace tatqa {

using json = nlohmann::json;

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// string.punctuation
bool is_punct(char c) {
  static constexpr std::string_view kPunct = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
  return kPunct.find(c) != std::string_view::npos;
}

// \w under re.UNICODE, with any non-ASCII byte treated as a word character
bool is_word_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '_';
}

bool is_number(std::string_view text) { return python_float(text).has_value(); }

std::string remove_articles(const std::string& text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      out += text[i++];
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    std::string_view run(text.data() + i, j - i);
    if (run == "a" || run == "an" || run == "the")
      out += ' ';
    else
      out.append(run);
    i = j;
  }
  return out;
}

std::string white_space_fix(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) {
      if (!out.empty()) out += ' ';
      out.append(text.substr(start, i - start));
    }
  }
  return out;
}

std::string strip_punct(std::string_view text) {
  std::string out;
  for (char c : text)
    if (!is_punct(c)) out += c;
  return out;
}

std::string remove_punc(const std::string& token, MetricMode mode) {
  if (is_number(token)) return token;
  std::string stripped = strip_punct(token);
  if (mode == MetricMode::SignAware && !token.empty() && token.front() == '-' && !stripped.empty() &&
      is_number(stripped))
    return "-" + stripped;
  return stripped;
}

std::string normalize_number(const std::string& token) {
  if (auto v = python_float(token)) return python_float_repr(*v);
  return token;
}

// re.split(" |-", text)
std::vector<std::string> drop_tokenize(std::string_view text) {
  std::vector<std::string> out(1);
  for (char c : text) {
    if (c == ' ' || c == '-')
      out.emplace_back();
    else
      out.back() += c;
  }
  return out;
}

// As above, except that a hyphen opening a token and followed by a digit, decimal point
// or currency sign is a minus sign and stays attached.
std::vector<std::string> sign_aware_tokenize(std::string_view text) {
  std::vector<std::string> out(1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == ' ') {
      out.emplace_back();
    } else if (c == '-') {
      char next = i + 1 < text.size() ? text[i + 1] : '\0';
      if (out.back().empty() && (is_digit(next) || next == '.' || next == '$'))
        out.back() += c;
      else
        out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::string lower_ascii(std::string_view text) { return detail::to_lower(text); }

bool match_numbers_if_present(const std::set<std::string>& gold, const std::set<std::string>& predicted) {
  std::set<std::string> gold_numbers, predicted_numbers;
  for (const auto& w : gold)
    if (is_number(w)) gold_numbers.insert(w);
  for (const auto& w : predicted)
    if (is_number(w)) predicted_numbers.insert(w);
  if (gold_numbers.empty()) return true;
  for (const auto& w : gold_numbers)
    if (predicted_numbers.count(w)) return true;
  return false;
}

struct Bags {
  std::vector<std::string> spans;
  std::vector<std::set<std::string>> bags;
};

Bags answer_to_bags(const std::vector<std::string>& raw, MetricMode mode) {
  Bags out;
  for (const auto& span : raw) {
    out.spans.push_back(normalize_answer(span, mode));
    out.bags.push_back(token_bag(span, mode));
  }
  return out;
}

// Exhaustive search over column subsets; the first optimal alignment in lexicographic
// order of column choices wins.
std::vector<int> small_assignment(const std::vector<std::vector<double>>& w, std::size_t n) {
  constexpr double kEps = 1e-12;
  auto weight = [&](std::size_t r, std::size_t c) {
    return r < w.size() && c < w[r].size() ? w[r][c] : 0.0;
  };
  std::vector<double> best(std::size_t{1} << n, -1.0);
  std::vector<char> known(best.size(), 0);
  std::function<double(std::size_t, std::size_t)> solve = [&](std::size_t row, std::size_t used) -> double {
    if (row == n) return 0.0;
    if (known[used]) return best[used];
    double b = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c)
      if (!(used >> c & 1)) b = std::max(b, weight(row, c) + solve(row + 1, used | (std::size_t{1} << c)));
    known[used] = 1;
    return best[used] = b;
  };
  std::vector<int> cols(w.size(), -1);
  std::size_t used = 0;
  for (std::size_t row = 0; row < n; ++row) {
    double target = solve(row, used);
    for (std::size_t c = 0; c < n; ++c) {
      if (used >> c & 1) continue;
      double v = weight(row, c) + solve(row + 1, used | (std::size_t{1} << c));
      if (v >= target - kEps) {
        if (row < cols.size()) cols[row] = c < (w.empty() ? 0 : w[0].size()) ? static_cast<int>(c) : -1;
        used |= std::size_t{1} << c;
        break;
      }
    }
  }
  return cols;
}

// Hungarian method (shortest augmenting path, potentials) minimizing -weight.
std::vector<int> hungarian(const std::vector<std::vector<double>>& w, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::size_t cols_real = w.empty() ? 0 : w[0].size();
  auto cost = [&](std::size_t r, std::size_t c) {
    return r < w.size() && c < cols_real ? -w[r][c] : 0.0;
  };
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> cols(w.size(), -1);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] && p[j] - 1 < w.size() && j - 1 < cols_real) cols[p[j] - 1] = static_cast<int>(j - 1);
  return cols;
}

Rational parse_json_number(const json& v, const std::string& path) {
  if (v.is_number_integer() || v.is_number_unsigned()) return Rational(BigInt(v.dump()));
  if (auto r = rational_from_decimal(v.dump())) return *r;
  throw ParseError(path, "unrepresentable number " + v.dump());
}

json answer_to_json(const AnswerValue& answer) {
  if (auto s = std::get_if<std::string>(&answer)) return *s;
  if (auto l = std::get_if<std::vector<std::string>>(&answer)) return *l;
  const Rational& r = std::get<Rational>(answer);
  if (denominator(r) == 1) {
    BigInt n = numerator(r);
    if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
      return n.convert_to<long long>();
  }
  // non-terminating values are written rounded to 12 places
  std::string text = to_decimal_string(r);
  return json::parse(text);
}

std::optional<Rational> prediction_number(const PredictionEntry& p) { return answer_number(p.answer); }

}  // namespace

std::optional<double> python_float(std::string_view text) {
  // Python strips surrounding whitespace before parsing
  text = detail::trim(text);
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  std::string rest = lower_ascii(text.substr(i));
  if (rest == "inf" || rest == "infinity")
    return negative ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  if (rest == "nan") return std::numeric_limits<double>::quiet_NaN();

  // digits with single underscores between digits
  std::string clean = negative ? "-" : "";
  std::size_t k = 0;
  auto digit_run = [&]() -> int {
    int n = 0;
    while (k < rest.size()) {
      if (is_digit(rest[k])) {
        clean += rest[k++];
        ++n;
      } else if (rest[k] == '_' && n > 0 && k + 1 < rest.size() && is_digit(rest[k + 1])) {
        ++k;
      } else {
        break;
      }
    }
    return n;
  };
  int mantissa_digits = digit_run();
  if (k < rest.size() && rest[k] == '.') {
    clean += rest[k++];
    mantissa_digits += digit_run();
  }
  if (mantissa_digits == 0) return std::nullopt;
  if (k < rest.size() && rest[k] == 'e') {
    clean += rest[k++];
    if (k < rest.size() && (rest[k] == '+' || rest[k] == '-')) clean += rest[k++];
    if (digit_run() == 0) return std::nullopt;
  }
  if (k != rest.size()) return std::nullopt;
  return std::strtod(clean.c_str(), nullptr);
}

std::string python_float_repr(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  if (value == 0.0) return std::signbit(value) ? "-0.0" : "0.0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
  std::string sci(buf, res.ptr);
  std::string sign;
  if (sci.front() == '-') {
    sign = "-";
    sci.erase(0, 1);
  }
  std::size_t e = sci.find('e');
  std::string digits;
  for (std::size_t i = 0; i < e; ++i)
    if (sci[i] != '.') digits += sci[i];
  int exponent = std::stoi(sci.substr(e + 1));

  if (exponent < -4 || exponent >= 16) {
    std::string out = sign + digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    char exp_buf[16];
    std::snprintf(exp_buf, sizeof exp_buf, "e%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
    return out + exp_buf;
  }
  if (exponent < 0) return sign + "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + digits;
  auto int_len = static_cast<std::size_t>(exponent + 1);
  if (digits.size() <= int_len) return sign + digits + std::string(int_len - digits.size(), '0') + ".0";
  return sign + digits.substr(0, int_len) + "." + digits.substr(int_len);
}

double python_round2(double value) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return std::strtod(buf, nullptr);
}

std::string normalize_answer(std::string_view text, MetricMode mode) {
  auto tokens = mode == MetricMode::Drop ? drop_tokenize(text) : sign_aware_tokenize(text);
  std::string out;
  for (const auto& token : tokens) {
    std::string part = white_space_fix(remove_articles(normalize_number(remove_punc(lower_ascii(token), mode))));
    if (detail::trim(part).empty()) continue;
    if (!out.empty()) out += ' ';
    out += part;
  }
  return std::string(detail::trim(out));
}

std::set<std::string> token_bag(std::string_view text, MetricMode mode) {
  std::set<std::string> bag;
  std::string normalized = normalize_answer(text, mode);
  for (const Word& w : split_words(normalized)) bag.insert(std::string(w.text));
  return bag;
}

double bag_f1(const std::set<std::string>& predicted, const std::set<std::string>& gold) {
  std::size_t intersection = 0;
  for (const auto& w : gold)
    if (predicted.count(w)) ++intersection;
  double precision = predicted.empty() ? 1.0 : static_cast<double>(intersection) / static_cast<double>(predicted.size());
  double recall = gold.empty() ? 1.0 : static_cast<double>(intersection) / static_cast<double>(gold.size());
  if (precision == 0.0 && recall == 0.0) return 0.0;
  return (2 * precision * recall) / (precision + recall);
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  std::size_t rows = weights.size();
  std::size_t cols = rows ? weights[0].size() : 0;
  std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  if (n <= 12) return small_assignment(weights, n);
  return hungarian(weights, n);
}

std::vector<double> align_bags(const std::vector<std::set<std::string>>& predicted,
                               const std::vector<std::set<std::string>>& gold) {
  std::vector<std::vector<double>> scores(gold.size(), std::vector<double>(predicted.size(), 0.0));
  for (std::size_t g = 0; g < gold.size(); ++g)
    for (std::size_t p = 0; p < predicted.size(); ++p)
      if (match_numbers_if_present(gold[g], predicted[p])) scores[g][p] = bag_f1(predicted[p], gold[g]);
  std::vector<double> max_scores(std::max(gold.size(), predicted.size()), 0.0);
  if (predicted.empty()) return max_scores;
  auto cols = max_weight_assignment(scores);
  for (std::size_t g = 0; g < cols.size(); ++g)
    if (cols[g] >= 0) max_scores[g] = std::max(max_scores[g], scores[g][static_cast<std::size_t>(cols[g])]);
  return max_scores;
}

MetricScore drop_metrics(const std::vector<std::string>& predicted, const std::vector<std::string>& gold,
                         MetricMode mode) {
  Bags p = answer_to_bags(predicted, mode);
  Bags g = answer_to_bags(gold, mode);
  MetricScore s;
  std::set<std::string> ps(p.spans.begin(), p.spans.end()), gs(g.spans.begin(), g.spans.end());
  s.em = ps == gs && p.spans.size() == g.spans.size() ? 1.0 : 0.0;
  auto per_bag = align_bags(p.bags, g.bags);
  double sum = 0.0;
  for (double v : per_bag) sum += v;
  s.f1 = per_bag.empty() ? 0.0 : python_round2(sum / static_cast<double>(per_bag.size()));
  return s;
}

RoundingPolicy RoundingPolicy::parse(std::string_view text) {
  std::string t = lower_ascii(detail::trim(text));
  RoundingPolicy policy;
  if (t == "gold") {
    policy.kind = Kind::GoldPrecision;
    return policy;
  }
  std::string_view digits = t;
  if (digits.substr(0, 9) == "decimals:") digits.remove_prefix(9);
  int places = -1;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), places);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || places < 0 || places > 12)
    throw UsageError("invalid rounding policy '" + std::string(text) + "' (expected decimals:N with 0<=N<=12, or gold)");
  policy.places = places;
  return policy;
}

std::string RoundingPolicy::name() const {
  return kind == Kind::GoldPrecision ? "gold" : "decimals:" + std::to_string(places);
}

bool numbers_match(const Rational& predicted, Scale predicted_scale, const Rational& gold, Scale gold_scale,
                   const RoundingPolicy& rounding, const ScaleFactors& factors) {
  Rational p = apply_scale(predicted, predicted_scale, factors);
  if (rounding.kind == RoundingPolicy::Kind::Decimals) {
    Rational g = apply_scale(gold, gold_scale, factors);
    return round_to_places(p, rounding.places) == round_to_places(g, rounding.places);
  }
  int places = decimal_places(gold).value_or(4);
  Rational in_gold_units = p / scale_factor(gold_scale, factors);
  return round_to_places(in_gold_units, places) == round_to_places(gold, places);
}

PredictionEntry to_entry(const Prediction& prediction) {
  return {prediction.value, prediction.scale, prediction.abstained};
}

MetricScore score_question(const PredictionEntry& prediction, const QuestionRecord& gold,
                           const ScoringOptions& options) {
  if (prediction.abstained) return {};
  bool numeric_type = gold.answer_type == AnswerType::Arithmetic || gold.answer_type == AnswerType::Counting;
  std::optional<Rational> gold_number;
  if (gold.answer_type != AnswerType::Spans) gold_number = answer_number(gold.answer);
  if (gold_number) {
    auto p = prediction_number(prediction);
    if (!p) return {};
    bool ok = numbers_match(*p, prediction.scale, *gold_number, gold.gold_scale, options.rounding, options.factors);
    return ok ? MetricScore{1.0, 1.0} : MetricScore{};
  }
  if (numeric_type && std::holds_alternative<Rational>(gold.answer)) return {};

  auto with_scale = [](const AnswerValue& answer, Scale scale) {
    auto spans = answer_strings(answer);
    if (scale != Scale::None)
      for (auto& s : spans) s += " " + std::string(scale_word(scale));
    return spans;
  };
  return drop_metrics(with_scale(prediction.answer, prediction.scale), with_scale(gold.answer, gold.gold_scale),
                      MetricMode::SignAware);
}

MetricScore score_question(const Prediction& prediction, const QuestionRecord& gold, const ScoringOptions& options) {
  return score_question(to_entry(prediction), gold, options);
}

PredictionMap parse_predictions(std::string_view json_text) {
  std::vector<std::string> keys;
  std::string duplicate;
  std::set<std::string> seen;
  json::parser_callback_t track = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key && depth == 1) {
      std::string key = parsed.get<std::string>();
      if (!seen.insert(key).second && duplicate.empty()) duplicate = key;
    }
    return true;
  };
  json root;
  try {
    root = json::parse(json_text, track);
  } catch (const json::parse_error& e) {
    throw ParseError("$", std::string("malformed JSON: ") + e.what());
  }
  if (!duplicate.empty()) throw ParseError("$." + duplicate, "duplicate question id");
  if (!root.is_object()) throw ParseError("$", "predictions must be an object keyed by question id");

  PredictionMap out;
  for (const auto& [qid, value] : root.items()) {
    std::string path = "$." + qid;
    if (!value.is_array() || value.size() != 2 || !value[1].is_string())
      throw ParseError(path, "expected [answer, scale]");
    PredictionEntry entry;
    auto scale = parse_scale(value[1].get<std::string>());
    if (!scale) throw ParseError(path + "[1]", "unknown scale '" + value[1].get<std::string>() + "'");
    entry.scale = *scale;
    const json& a = value[0];
    if (a.is_string()) {
      entry.answer = a.get<std::string>();
    } else if (a.is_number()) {
      entry.answer = parse_json_number(a, path + "[0]");
    } else if (a.is_array()) {
      std::vector<std::string> spans;
      for (const auto& s : a) {
        if (s.is_string())
          spans.push_back(s.get<std::string>());
        else if (s.is_number())
          spans.push_back(to_decimal_string(parse_json_number(s, path + "[0]")));
        else
          throw ParseError(path + "[0]", "span lists hold strings or numbers");
      }
      entry.answer = std::move(spans);
    } else if (a.is_null()) {
      entry.answer = std::string();
      entry.abstained = true;
    } else {
      throw ParseError(path + "[0]", "unsupported answer kind");
    }
    out.emplace(qid, std::move(entry));
  }
  return out;
}

PredictionMap load_predictions(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const std::runtime_error& e) {
    throw Error(e.what());
  }
  return parse_predictions(text);
}

std::string serialize_predictions(const std::vector<std::pair<std::string, PredictionEntry>>& predictions) {
  json root = json::object();
  for (const auto& [qid, p] : predictions) {
    if (root.contains(qid)) throw ScoringError("duplicate question id " + qid);
    json answer = p.abstained ? json(nullptr) : answer_to_json(p.answer);
    root[qid] = json::array({answer, std::string(scale_word(p.scale))});
  }
  return root.dump(2) + "\n";
}

EvalReport evaluate(const PredictionMap& predictions, const Dataset& gold, const ScoringOptions& options) {
  EvalReport report;
  std::set<std::string> gold_ids;
  for (const auto& entry : gold) {
    for (const auto& q : entry.questions) {
      gold_ids.insert(q.question_id);
      QuestionScore qs{q.question_id, q.answer_type, q.answer_source, 0.0, 0.0, false};
      auto it = predictions.find(q.question_id);
      if (it == predictions.end()) {
        qs.missing = true;
        ++report.missing;
      } else {
        MetricScore s = score_question(it->second, q, options);
        qs.em = s.em;
        qs.f1 = s.f1;
      }
      auto t = static_cast<std::size_t>(q.answer_type);
      auto src = static_cast<std::size_t>(q.answer_source);
      report.cells[t][src].add(qs.em, qs.f1);
      report.by_type[t].add(qs.em, qs.f1);
      report.by_source[src].add(qs.em, qs.f1);
      report.overall.add(qs.em, qs.f1);
      report.records.push_back(std::move(qs));
    }
  }
  for (const auto& [qid, _] : predictions)
    if (!gold_ids.count(qid)) report.unknown_ids.push_back(qid);
  report.em = report.overall.em();
  report.f1 = report.overall.f1();
  return report;
}

MetricScore score_by_id(const PredictionMap& predictions, const Dataset& gold, const std::string& question_id,
                        const ScoringOptions& options) {
  for (const auto& entry : gold)
    for (const auto& q : entry.questions)
      if (q.question_id == question_id) {
        auto it = predictions.find(question_id);
        return it == predictions.end() ? MetricScore{} : score_question(it->second, q, options);
      }
  throw ScoringError("unknown question id " + question_id);
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  auto cell = [](const CellScore& c) {
    char buf[64];
    if (c.count == 0)
      std::snprintf(buf, sizeof buf, "%-22s", "-");
    else
      std::snprintf(buf, sizeof buf, "%5.1f / %5.1f (%5zu)   ", c.em(), c.f1(), c.count);
    return std::string(buf);
  };
  char head[160];
  std::snprintf(head, sizeof head, "%-12s%-22s%-22s%-22s%-22s\n", "EM / F1", "Table", "Text", "Table-Text", "Total");
  out << head;
  constexpr std::array<AnswerType, 4> types = {AnswerType::Span, AnswerType::Spans, AnswerType::Counting,
                                               AnswerType::Arithmetic};
  for (AnswerType t : types) {
    auto ti = static_cast<std::size_t>(t);
    char label[32];
    std::snprintf(label, sizeof label, "%-12s", std::string(answer_type_name(t)).c_str());
    out << label;
    for (std::size_t s = 0; s < 3; ++s) out << cell(report.cells[ti][s]);
    out << cell(report.by_type[ti]) << "\n";
  }
  out << "Total       ";
  for (std::size_t s = 0; s < 3; ++s) out << cell(report.by_source[s]);
  out << cell(report.overall) << "\n";
  char tail[160];
  std::snprintf(tail, sizeof tail, "\nExact Match %.2f  F1 %.2f  questions %zu  missing %zu  unknown ids %zu\n",
                report.em, report.f1, report.overall.count, report.missing, report.unknown_ids.size());
  out << tail;
  return out.str();
}

std::string report_to_json(const EvalReport& report) {
  auto cell = [](const CellScore& c) { return json{{"count", c.count}, {"em", c.em()}, {"f1", c.f1()}}; };
  json root;
  root["em"] = report.em;
  root["f1"] = report.f1;
  root["questions"] = report.overall.count;
  root["missing"] = report.missing;
  root["unknown_ids"] = report.unknown_ids;
  json cells = json::object();
  for (std::size_t t = 0; t < 4; ++t) {
    std::string type(answer_type_word(static_cast<AnswerType>(t)));
    json row = json::object();
    for (std::size_t s = 0; s < 3; ++s)
      row[std::string(answer_source_word(static_cast<AnswerSource>(s)))] = cell(report.cells[t][s]);
    row["total"] = cell(report.by_type[t]);
    cells[type] = row;
  }
  json totals = json::object();
  for (std::size_t s = 0; s < 3; ++s)
    totals[std::string(answer_source_word(static_cast<AnswerSource>(s)))] = cell(report.by_source[s]);
  totals["total"] = cell(report.overall);
  cells["total"] = totals;
  root["cells"] = cells;
  json records = json::array();
  for (const auto& r : report.records)
    records.push_back({{"question_id", r.question_id}, {"em", r.em}, {"f1", r.f1}, {"missing", r.missing}});
  root["records"] = records;
  return root.dump(2) + "\n";
}

}  // namespace tatqa
