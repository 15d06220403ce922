#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tatqa/numerics.hpp"
#include "tatqa/text.hpp"
#include "test_support.hpp"

using namespace tatqa;
using tatqa::testing::dec;

TEST(ParseNumber, PlainAndSeparated) {
  EXPECT_EQ(parse_number("1,234.5")->value, dec("1234.5"));
  EXPECT_EQ(parse_number("125,843")->value, 125843);
  EXPECT_EQ(parse_number("0.22")->value, dec("0.22"));
  EXPECT_EQ(parse_number("-375")->value, -375);
  EXPECT_EQ(parse_number(".5")->value, dec("0.5"));
}

TEST(ParseNumber, CurrencyAndNegatives) {
  EXPECT_EQ(parse_number("$125,843")->value, 125843);
  EXPECT_EQ(parse_number("US$ 1,000")->value, 1000);
  EXPECT_EQ(parse_number("(1,234)")->value, -1234);
  EXPECT_EQ(parse_number("$(5.5)")->value, dec("-5.5"));
  EXPECT_EQ(parse_number("\xE2\x88\x92" "3")->value, -3);
}

TEST(ParseNumber, PercentSign) {
  auto p = parse_number("39%");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->value, 39);
  EXPECT_TRUE(p->had_percent_sign);
  EXPECT_EQ(p->source_text, "39%");
  EXPECT_FALSE(parse_number("39")->had_percent_sign);
}

TEST(ParseNumber, RejectsNonNumbers) {
  for (const char* s : {"", "abc", "1,23", "12,3456", "1.2.3", "$", "()", "5th", "2019-2018", "--5"})
    EXPECT_FALSE(parse_number(s)) << s;
}

TEST(Scale, FactorsAndWords) {
  EXPECT_EQ(apply_scale(dec("0.22"), Scale::Million), 220000);
  EXPECT_EQ(scale_factor(Scale::None), 1);
  EXPECT_EQ(scale_factor(Scale::Thousand), 1000);
  EXPECT_EQ(scale_factor(Scale::Billion), 1000000000);
  EXPECT_EQ(scale_factor(Scale::Percent), Rational(1, 100));
  ScaleFactors whole;
  whole.percent_exponent = 0;
  EXPECT_EQ(scale_factor(Scale::Percent, whole), 1);
  for (Scale s : kAllScales) {
    EXPECT_EQ(parse_scale(scale_word(s)), s);
    EXPECT_EQ(parse_scale(scale_name(s)), s);
  }
  EXPECT_EQ(parse_scale("none"), Scale::None);
  EXPECT_EQ(parse_scale("Million"), Scale::Million);
  EXPECT_FALSE(parse_scale("dozen"));
}

TEST(Rounding, HalfAwayFromZero) {
  EXPECT_EQ(round_to_places(dec("2.345"), 2), dec("2.35"));
  EXPECT_EQ(round_to_places(dec("-2.345"), 2), dec("-2.35"));
  EXPECT_EQ(round_to_places(dec("2.344"), 2), dec("2.34"));
  EXPECT_EQ(round_to_places(Rational(1033, 10353), 4), dec("0.0998"));
  EXPECT_EQ(round_to_places(dec("0.5"), 0), 1);
  EXPECT_EQ(round_to_places(dec("-0.5"), 0), -1);
}

TEST(Decimal, PlacesAndStrings) {
  EXPECT_EQ(decimal_places(dec("9.98")), 2);
  EXPECT_EQ(decimal_places(Rational(105226)), 0);
  EXPECT_FALSE(decimal_places(Rational(1, 3)));
  EXPECT_EQ(to_decimal_string(dec("9.980")), "9.98");
  EXPECT_EQ(to_decimal_string(Rational(-1657)), "-1657");
  EXPECT_EQ(to_decimal_string(Rational(1, 3), 4), "0.3333");
  EXPECT_EQ(to_decimal_string(Rational(2, 3), 4), "0.6667");
  EXPECT_EQ(rational_from_decimal("1.5e3"), 1500);
  EXPECT_EQ(rational_from_double(0.1), dec("0.1"));
}

TEST(ExtractNumbers, Offsets) {
  auto m = extract_numbers("was $38.1 billion, $26.6 billion and 16.2 in 2019");
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0].number.value, dec("38.1"));
  EXPECT_EQ(m[3].number.value, 2019);
  EXPECT_EQ(std::string("was $38.1 billion").substr(m[0].begin, m[0].end - m[0].begin), "$38.1");
  EXPECT_TRUE(extract_numbers("Q4 and 10x growth").empty());
}

namespace {

struct Sample {
  Rational value;
  NumberFormat format;
};

Sample random_number(std::mt19937_64& rng) {
  std::uniform_int_distribution<long long> mag(-2'000'000'000LL, 2'000'000'000LL);
  std::uniform_int_distribution<int> places(0, 4), flag(0, 1);
  Rational v(mag(rng), static_cast<long long>(std::pow(10, places(rng))));
  NumberFormat f;
  f.thousands_separators = flag(rng);
  f.currency = flag(rng);
  f.parenthesized_negative = flag(rng);
  f.percent = flag(rng);
  return {v, f};
}

}  // namespace

TEST(NumericsProperty, RenderParseRoundTrip) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 5000; ++i) {
    Sample s = random_number(rng);
    std::string text = render_number(s.value, s.format);
    auto p = parse_number(text);
    ASSERT_TRUE(p) << text;
    EXPECT_EQ(p->value, s.value) << text;
    EXPECT_EQ(p->had_percent_sign, s.format.percent) << text;
  }
}

// Brute force: tokens are space separated, so every whole token that parses is a number.
TEST(NumericsProperty, ExtractMatchesTokenwiseParse) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> words = {"revenue", "of", "(In", "millions)", "total", "Q4", "FY2019", "and",
                                          "was", "$m", "a", "10x"};
  std::uniform_int_distribution<int> coin(0, 2), pick(0, static_cast<int>(words.size()) - 1), len(1, 20);
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    int n = len(rng);
    for (int k = 0; k < n; ++k) {
      if (k) text += ' ';
      text += coin(rng) == 0 ? render_number(random_number(rng).value, random_number(rng).format)
                             : words[static_cast<std::size_t>(pick(rng))];
    }
    std::vector<std::pair<std::size_t, Rational>> expected;
    for (const Word& w : split_words(text))
      if (auto p = parse_number(w.text)) expected.emplace_back(w.begin, p->value);
    auto got = extract_numbers(text);
    ASSERT_EQ(got.size(), expected.size()) << text;
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_EQ(got[k].begin, expected[k].first) << text;
      EXPECT_EQ(got[k].number.value, expected[k].second) << text;
    }
  }
}
