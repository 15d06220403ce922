#include "tatqa/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

#include "text_util.hpp"

namespace tatqa {

namespace {

constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";
constexpr std::array<std::string_view, 5> kCurrencies = {"US$", "$", "\xE2\x82\xAC", "\xC2\xA3",
                                                         "\xC2\xA5"};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::size_t match_minus(std::string_view s, std::size_t i) {
  if (i < s.size() && s[i] == '-') return 1;
  if (s.substr(i).starts_with(kUnicodeMinus)) return kUnicodeMinus.size();
  return 0;
}

std::size_t match_currency(std::string_view s, std::size_t i) {
  for (auto c : kCurrencies)
    if (s.substr(i).starts_with(c)) return c.size();
  return 0;
}

// Digits with optional comma grouping and an optional fractional part. Returns the
// number of bytes consumed (0 when no digits) and appends the bare digits to `out`.
std::size_t match_body(std::string_view s, std::size_t i, std::string& out) {
  std::size_t j = i;
  while (j < s.size() && is_digit(s[j])) ++j;
  std::size_t lead = j - i;
  out.append(s.substr(i, lead));
  if (lead >= 1 && lead <= 3) {
    // ",ddd" groups, each exactly three digits and not followed by another digit
    while (j + 3 < s.size() && s[j] == ',' && is_digit(s[j + 1]) && is_digit(s[j + 2]) &&
           is_digit(s[j + 3]) && (j + 4 >= s.size() || !is_digit(s[j + 4]))) {
      out.append(s.substr(j + 1, 3));
      j += 4;
    }
  }
  if (j < s.size() && s[j] == '.' && j + 1 < s.size() && is_digit(s[j + 1])) {
    out.push_back('.');
    ++j;
    while (j < s.size() && is_digit(s[j])) out.push_back(s[j++]);
  } else if (lead == 0) {
    return 0;
  }
  return j - i;
}

struct RawMatch {
  std::size_t length = 0;
  bool negative = false;
  bool percent = false;
  std::string digits;
};

// Longest number starting exactly at `i`; length 0 when none.
RawMatch match_number(std::string_view s, std::size_t i, bool allow_paren) {
  RawMatch m;
  std::size_t j = i;
  if (allow_paren && j < s.size() && s[j] == '(') {
    RawMatch inner = match_number(s, j + 1, false);
    std::size_t k = j + 1 + inner.length;
    if (inner.length > 0 && !inner.negative) {
      if (k < s.size() && s[k] == ')') {
        inner.length = k + 1 - i;
        if (k + 1 < s.size() && s[k + 1] == '%') {
          inner.percent = true;
          inner.length += 1;
        }
        inner.negative = true;
        return inner;
      }
    }
    return m;
  }
  if (std::size_t n = match_minus(s, j)) {
    m.negative = true;
    j += n;
  }
  if (std::size_t n = match_currency(s, j)) {
    j += n;
    if (j < s.size() && s[j] == ' ') ++j;
    // "$(5.5)"
    if (allow_paren && !m.negative && j < s.size() && s[j] == '(') {
      RawMatch inner = match_number(s, j, true);
      if (inner.length == 0) return RawMatch{};
      inner.length += j - i;
      return inner;
    }
    if (!m.negative) {
      if (std::size_t k = match_minus(s, j)) {
        m.negative = true;
        j += k;
      }
    }
  }
  std::size_t body = match_body(s, j, m.digits);
  if (body == 0) return RawMatch{};
  j += body;
  if (j < s.size() && s[j] == '%') {
    m.percent = true;
    ++j;
  }
  m.length = j - i;
  return m;
}

ParsedNumber to_parsed(const RawMatch& m, std::string_view source) {
  ParsedNumber p;
  p.value = *rational_from_decimal(m.digits);
  if (m.negative) p.value = -p.value;
  p.had_percent_sign = m.percent;
  p.source_text = std::string(source);
  return p;
}

}  // namespace

std::string_view scale_word(Scale scale) {
  switch (scale) {
    case Scale::None: return "";
    case Scale::Thousand: return "thousand";
    case Scale::Million: return "million";
    case Scale::Billion: return "billion";
    case Scale::Percent: return "percent";
  }
  return "";
}

std::string_view scale_name(Scale scale) {
  switch (scale) {
    case Scale::None: return "None";
    case Scale::Thousand: return "Thousand";
    case Scale::Million: return "Million";
    case Scale::Billion: return "Billion";
    case Scale::Percent: return "Percent";
  }
  return "None";
}

std::optional<Scale> parse_scale(std::string_view text) {
  std::string t = detail::to_lower(detail::trim(text));
  if (t.empty() || t == "none") return Scale::None;
  for (Scale s : kAllScales)
    if (t == scale_word(s)) return s;
  return std::nullopt;
}

Rational pow10(int exponent) {
  BigInt p = 1;
  for (int i = 0; i < std::abs(exponent); ++i) p *= 10;
  return exponent >= 0 ? Rational(p) : Rational(BigInt(1), p);
}

Rational scale_factor(Scale scale, const ScaleFactors& f) {
  switch (scale) {
    case Scale::None: return Rational(1);
    case Scale::Thousand: return pow10(f.thousand_exponent);
    case Scale::Million: return pow10(f.million_exponent);
    case Scale::Billion: return pow10(f.billion_exponent);
    case Scale::Percent: return pow10(f.percent_exponent);
  }
  return Rational(1);
}

Rational apply_scale(const Rational& value, Scale scale, const ScaleFactors& factors) {
  return value * scale_factor(scale, factors);
}

std::optional<ParsedNumber> parse_number(std::string_view text) {
  std::string_view t = detail::trim(text);
  if (t.empty()) return std::nullopt;
  RawMatch m = match_number(t, 0, true);
  if (m.length == 0) return std::nullopt;
  // "12 %" is common in table cells
  if (m.length + 2 == t.size() && !m.percent && t[m.length] == ' ' && t[m.length + 1] == '%') {
    m.percent = true;
    m.length = t.size();
  }
  if (m.length != t.size()) return std::nullopt;
  return to_parsed(m, text);
}

std::vector<NumberMatch> extract_numbers(std::string_view text) {
  std::vector<NumberMatch> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    bool prev_alnum = i > 0 && is_alnum(text[i - 1]);
    bool starter = is_digit(c) || c == '(' || match_minus(text, i) || match_currency(text, i) ||
                   (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]));
    if (!starter) {
      ++i;
      continue;
    }
    RawMatch m;
    bool currency_start = match_currency(text, i) > 0;
    if (!prev_alnum || currency_start) m = match_number(text, i, true);
    bool ok = m.length > 0;
    if (ok) {
      std::size_t e = i + m.length;
      // a number glued to letters ("10x", "5th") is not a numeric token
      if (e < text.size() && is_alnum(text[e])) ok = false;
    }
    if (!ok) {
      if (is_alnum(c)) {
        while (i < text.size() && is_alnum(text[i])) ++i;
      } else {
        ++i;
      }
      continue;
    }
    NumberMatch nm;
    nm.begin = i;
    nm.end = i + m.length;
    nm.number = to_parsed(m, text.substr(nm.begin, m.length));
    out.push_back(std::move(nm));
    i += m.length;
  }
  return out;
}

std::optional<Rational> rational_from_decimal(std::string_view text) {
  std::string_view t = detail::trim(text);
  bool negative = false;
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    negative = t[0] == '-';
    t.remove_prefix(1);
  }
  if (t.empty()) return std::nullopt;
  BigInt num = 0;
  int frac = 0;
  bool seen_point = false;
  bool any_digit = false;
  std::size_t i = 0;
  for (; i < t.size(); ++i) {
    char c = t[i];
    if (is_digit(c)) {
      num = num * 10 + (c - '0');
      any_digit = true;
      if (seen_point) ++frac;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return std::nullopt;
  int exponent = 0;
  if (i < t.size() && (t[i] == 'e' || t[i] == 'E')) {
    ++i;
    int sign = 1;
    if (i < t.size() && (t[i] == '+' || t[i] == '-')) sign = t[i++] == '-' ? -1 : 1;
    if (i == t.size()) return std::nullopt;
    int e = 0;
    for (; i < t.size() && is_digit(t[i]); ++i) e = e * 10 + (t[i] - '0');
    exponent = sign * e;
  }
  if (i != t.size()) return std::nullopt;
  Rational r = Rational(num) * pow10(exponent - frac);
  return negative ? Rational(-r) : r;
}

Rational rational_from_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return rational_from_decimal(std::string_view(buf, res.ptr - buf)).value_or(Rational(0));
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational round_to_places(const Rational& value, int places) {
  Rational scale = pow10(places);
  Rational scaled = value * scale;
  BigInt num = boost::multiprecision::numerator(scaled);
  BigInt den = boost::multiprecision::denominator(scaled);
  bool negative = num < 0;
  if (negative) num = -num;
  BigInt q = num / den;
  BigInt r = num % den;
  if (r * 2 >= den) q += 1;
  if (negative) q = -q;
  return Rational(q) / scale;
}

std::optional<int> decimal_places(const Rational& value) {
  BigInt den = boost::multiprecision::denominator(value);
  int twos = 0, fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return std::nullopt;
  return std::max(twos, fives);
}

std::string to_decimal_string(const Rational& value, int max_places) {
  int places = max_places;
  if (auto exact = decimal_places(value); exact && *exact <= max_places) places = *exact;
  Rational rounded = round_to_places(value, places);
  BigInt scaled = boost::multiprecision::numerator(rounded * pow10(places));
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.str();
  if (places > 0) {
    if (static_cast<int>(digits.size()) <= places)
      digits.insert(0, std::string(places + 1 - digits.size(), '0'));
    digits.insert(digits.size() - places, ".");
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
  }
  if (negative && digits != "0") digits.insert(0, "-");
  return digits;
}

std::string render_number(const Rational& value, const NumberFormat& format) {
  bool negative = value < 0;
  std::string body = to_decimal_string(negative ? Rational(-value) : value, format.max_places);
  if (format.thousands_separators) {
    std::size_t point = body.find('.');
    std::size_t int_len = point == std::string::npos ? body.size() : point;
    for (std::size_t k = int_len; k > 3; k -= 3) body.insert(k - 3, ",");
  }
  if (format.currency) body.insert(0, "$");
  if (negative && body != "0" && body != "$0") {
    if (format.parenthesized_negative)
      body = "(" + body + ")";
    else
      body.insert(0, "-");
  }
  if (format.percent) body += "%";
  return body;
}

}  // namespace tatqa
