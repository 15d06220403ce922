#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace tatqa {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed dataset / prediction file. `path` is a JSON-pointer-like record path.
struct ParseError : Error {
  ParseError(std::string path, const std::string& what)
      : Error(path + ": " + what), path(std::move(path)) {}
  std::string path;
};

// Data-model invariant violation; `record` names the context_id or question_id.
struct ValidationError : Error {
  ValidationError(std::string record, const std::string& what)
      : Error(record + ": " + what), record(std::move(record)) {}
  std::string record;
};

struct DerivationParseError : Error {
  DerivationParseError(std::size_t offset, const std::string& what)
      : Error("derivation parse error at offset " + std::to_string(offset) + ": " + what),
        offset(offset) {}
  std::size_t offset;
};

struct ExecutionError : Error {
  using Error::Error;
};

struct UnlocatableEvidence : Error {
  UnlocatableEvidence(std::string question_id, const std::string& evidence)
      : Error(question_id + ": evidence '" + evidence + "' not found in context"),
        question_id(std::move(question_id)), evidence(evidence) {}
  std::string question_id;
  std::string evidence;
};

struct UnsupportedOperator : Error {
  using Error::Error;
};

struct InsufficientEvidence : Error {
  using Error::Error;
};

struct ScoringError : Error {
  using Error::Error;
};

struct UsageError : Error {
  using Error::Error;
};

}  // namespace tatqa
