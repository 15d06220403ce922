#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tatqa/corpus.hpp"
#include "tatqa/numerics.hpp"

namespace tatqa::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(TATQA_TEST_DATA) / name;
}

inline const Dataset& worked_examples() {
  static const Dataset d = load_dataset(data_path("worked_examples.json"));
  return d;
}

struct Item {
  const QuestionRecord& question;
  const HybridContext& context;
};

inline Item find(const Dataset& data, std::string_view id) {
  for (const auto& e : data)
    for (const auto& q : e.questions)
      if (q.question_id == id) return {q, e.context};
  throw std::out_of_range("no question " + std::string(id));
}

inline Item example(std::string_view id) { return find(worked_examples(), id); }

inline Rational dec(std::string_view text) {
  auto r = rational_from_decimal(text);
  if (!r) throw std::invalid_argument("bad decimal " + std::string(text));
  return *r;
}

}  // namespace tatqa::testing
