#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridqa/engine.hpp"

namespace gridqa {

/// Schema and lexicon shipped with the library (the power-grid domain).
std::string_view bundled_schema_json();
std::string_view bundled_lexicon_json();

struct GenerateOptions {
  std::uint64_t seed = 42;
  std::size_t vertices = 10000;
  /// Scales the probability of optional transformer edges (ofType, suppliedBy).
  double density = 1.0;
  std::size_t cases = 50;
};

struct EvalCase {
  std::string id;
  std::string template_name;
  std::string question;
  std::optional<std::string> deps;     // CoNLL-U override for `question`
  std::vector<std::string> previous;   // earlier turns of a follow-up case
  std::optional<std::string> merged_question;
  bool multi_hop = false;
  bool multi_condition = false;
  std::optional<std::vector<std::string>> expected;  // sorted vertex ids
  std::optional<std::string> expected_error;         // ErrorCode name

  bool follow_up() const { return !previous.empty(); }
  nlohmann::json to_json() const;
  static EvalCase from_json(const nlohmann::json& j);
};

std::vector<EvalCase> load_corpus(const std::filesystem::path& path);
nlohmann::json corpus_to_json(const std::vector<EvalCase>& cases);

struct GeneratedData {
  std::string schema;
  std::string vertices;  // JSON lines
  std::string edges;     // JSON lines
  std::string lexicon;
  std::vector<EvalCase> cases;
};

/// Deterministic for a fixed options value.
GeneratedData generate(const GenerateOptions& options);
/// Writes schema.json, vertices.jsonl, edges.jsonl, lexicon.json, corpus.json.
void write_generated(const GeneratedData& data, const std::filesystem::path& dir);

enum class Outcome { Accepted, ParsingError, ReasoningError, WrongAnswer, LabelMismatch };

std::string_view to_string(Outcome outcome);

struct CaseResult {
  std::string id;
  std::string question;
  bool multi_hop = false;  // declared labels
  bool multi_condition = false;
  std::optional<std::size_t> measured_hops;  // plan route steps
  std::optional<std::size_t> measured_conditions;
  Outcome outcome = Outcome::Accepted;
  std::optional<std::string> error;
  std::string message;
  std::vector<std::string> answers;
  double elapsed_ms = 0;  // mean over repeats
};

struct CategoryRow {
  std::size_t quantity = 0;
  std::size_t parsing_errors = 0;
  std::size_t reasoning_errors = 0;
  std::size_t accepted = 0;
  std::size_t other = 0;  // wrong answers and label mismatches
  double total_ms = 0;

  double accepted_rate() const { return quantity ? static_cast<double>(accepted) / quantity : 0.0; }
  double average_ms() const { return quantity ? total_ms / quantity : 0.0; }
};

struct EvalReport {
  CategoryRow single_hop, multi_hop, single_condition, multi_condition, total;
  std::vector<CaseResult> cases;

  /// Aligned table: one column per category, one row per measure.
  std::string table() const;
  nlohmann::json to_json() const;
};

struct EvalOptions {
  std::size_t concurrency = 1;
  std::size_t repeats = 5;
};

EvalReport evaluate(const Engine& engine, const std::vector<EvalCase>& cases,
                    EvalOptions options = {});

}  // namespace gridqa
