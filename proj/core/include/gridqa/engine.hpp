#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gridqa/graph_store.hpp"
#include "gridqa/nlq.hpp"
#include "gridqa/query.hpp"
#include "gridqa/reasoner.hpp"
#include "gridqa/schema.hpp"

namespace gridqa {

struct EngineOptions {
  /// "Now" for duration windows when the question names no year.
  Date evaluation_date = make_date(2024, 12, 31);
  PlanOptions plan{};
};

struct Analysis {
  TaggedQuestion tagged;
  DependencyTree tree;
  ParsedQuestion parsed;
};

struct Answer {
  ParsedQuestion parsed;
  ReasoningPlan plan;
  TraversalPlan traversal;
  AnswerGraph graph;

  nlohmann::json to_json(const GraphStore& store, bool with_timing = true) const;
};

/// Everything needed to answer questions over one dataset. Immutable after
/// construction, so a single engine serves concurrent callers.
class Engine {
 public:
  /// Reads schema.json, vertices.jsonl, edges.jsonl and lexicon.json.
  static Engine open(const std::filesystem::path& dir, EngineOptions options = {});

  Engine(std::shared_ptr<const OntologySchema> schema, std::shared_ptr<const GraphStore> store,
         std::shared_ptr<const Lexicon> lexicon, EngineOptions options = {});

  const OntologySchema& schema() const { return *schema_; }
  const GraphStore& store() const { return *store_; }
  const Lexicon& lexicon() const { return *lexicon_; }
  const SchemaGraph& graph() const { return *graph_; }
  const Tagger& tagger() const { return *tagger_; }
  const EngineOptions& options() const { return options_; }

  /// Tags, parses and extracts. `conllu` replaces the built-in parser.
  /// With `require_target` false a missing target is left empty instead of
  /// throwing NoTargetFound.
  Analysis analyze(std::string_view question, const std::optional<std::string>& conllu = {},
                   bool require_target = true) const;

  Answer answer(ParsedQuestion parsed) const;
  Answer ask(std::string_view question, const std::optional<std::string>& conllu = {}) const;

 private:
  std::shared_ptr<const OntologySchema> schema_;
  std::shared_ptr<const GraphStore> store_;
  std::shared_ptr<const Lexicon> lexicon_;
  std::shared_ptr<const SchemaGraph> graph_;
  std::shared_ptr<const Tagger> tagger_;
  EngineOptions options_;
};

}  // namespace gridqa
