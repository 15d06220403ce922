#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace tatqa {

// Exact arithmetic for every operand, derivation and operator result.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

enum class Scale { None, Thousand, Million, Billion, Percent };

inline constexpr std::array<Scale, 5> kAllScales = {Scale::None, Scale::Thousand, Scale::Million,
                                                    Scale::Billion, Scale::Percent};

// Lower-case scale word as used by the dataset release ("" for None).
std::string_view scale_word(Scale scale);
// Display name ("None", "Thousand", ...).
std::string_view scale_name(Scale scale);
// Accepts the release words, display names and "none"; case-insensitive.
std::optional<Scale> parse_scale(std::string_view text);

// Power-of-ten exponents for each scale. Percent defaults to 10^-2.
struct ScaleFactors {
  int thousand_exponent = 3;
  int million_exponent = 6;
  int billion_exponent = 9;
  int percent_exponent = -2;
};

Rational pow10(int exponent);
Rational scale_factor(Scale scale, const ScaleFactors& factors = {});
Rational apply_scale(const Rational& value, Scale scale, const ScaleFactors& factors = {});

struct ParsedNumber {
  Rational value;
  bool had_percent_sign = false;
  std::string source_text;
};

// Parses a whole string as one financial number: optional currency symbol, thousands
// separators, decimal point, leading minus, trailing percent sign and accountant's
// parenthesized negatives. Absent when the text is anything else.
std::optional<ParsedNumber> parse_number(std::string_view text);

struct NumberMatch {
  ParsedNumber number;
  std::size_t begin = 0;  // byte offsets into the scanned text, [begin, end)
  std::size_t end = 0;
};

// Left-to-right, non-overlapping, maximal numeric tokens.
std::vector<NumberMatch> extract_numbers(std::string_view text);

// Exact value of a plain decimal literal such as "-12.5" or "0.0998".
std::optional<Rational> rational_from_decimal(std::string_view text);
// Value of the shortest round-trip decimal representation of `value`.
Rational rational_from_double(double value);
double to_double(const Rational& value);

// Half away from zero.
Rational round_to_places(const Rational& value, int places);
// Number of fractional digits of a terminating decimal; absent when the expansion repeats.
std::optional<int> decimal_places(const Rational& value);
// Exact when the expansion terminates within `max_places`, otherwise rounded to it.
// Trailing zeros are dropped; integers render without a decimal point.
std::string to_decimal_string(const Rational& value, int max_places = 12);

// Surface conventions used by financial reports; render_number is the inverse of
// parse_number under each of them.
struct NumberFormat {
  bool thousands_separators = false;
  bool currency = false;
  bool parenthesized_negative = false;
  bool percent = false;
  int max_places = 12;
};

std::string render_number(const Rational& value, const NumberFormat& format);

}  // namespace tatqa
