#include "gridqa/engine.hpp"

#include "gridqa/error.hpp"

namespace gridqa {

using nlohmann::json;

json Answer::to_json(const GraphStore& store, bool with_timing) const {
  json j = graph.to_json(store, with_timing);
  j["question"] = parsed.raw;
  j["parsed"] = parsed.to_json();
  j["plan"] = plan.to_json();
  return j;
}

Engine Engine::open(const std::filesystem::path& dir, EngineOptions options) {
  auto schema = std::make_shared<const OntologySchema>(OntologySchema::load_file(dir / "schema.json"));
  auto store = std::make_shared<const GraphStore>(
      GraphStore::load_files(schema, dir / "vertices.jsonl", dir / "edges.jsonl"));
  auto lexicon =
      std::make_shared<const Lexicon>(Lexicon::load_file(dir / "lexicon.json", *schema, store.get()));
  return Engine(schema, store, lexicon, options);
}

Engine::Engine(std::shared_ptr<const OntologySchema> schema, std::shared_ptr<const GraphStore> store,
               std::shared_ptr<const Lexicon> lexicon, EngineOptions options)
    : schema_(std::move(schema)),
      store_(std::move(store)),
      lexicon_(std::move(lexicon)),
      graph_(std::make_shared<const SchemaGraph>(*schema_)),
      tagger_(std::make_shared<const Tagger>(*schema_, *store_, *lexicon_)),
      options_(options) {}

Analysis Engine::analyze(std::string_view question, const std::optional<std::string>& conllu,
                         bool require_target) const {
  TaggedQuestion tagged = tagger_->tag(question);
  DependencyTree tree = conllu ? parse_conllu(*conllu, tagged.tokens) : parse_dependencies(tagged);
  std::optional<Target> target;
  try {
    target = extract_target(tree, tagged, *schema_);
  } catch (const Error& e) {
    if (require_target || e.code() != ErrorCode::NoTargetFound) throw;
  }
  ParsedQuestion parsed{std::string(question), target,
                        extract_constraints(tree, tagged, target, *schema_, *store_)};
  return Analysis{std::move(tagged), std::move(tree), std::move(parsed)};
}

Answer Engine::answer(ParsedQuestion parsed) const {
  if (!parsed.target) throw Error(ErrorCode::NoTargetFound, "question has no target");
  ReasoningPlan rp = plan(*schema_, *graph_, parsed, options_.plan);
  TraversalPlan tp = compile(rp, parsed, *store_, options_.evaluation_date);
  AnswerGraph g = execute(*store_, tp);
  return Answer{std::move(parsed), std::move(rp), std::move(tp), std::move(g)};
}

Answer Engine::ask(std::string_view question, const std::optional<std::string>& conllu) const {
  return answer(analyze(question, conllu).parsed);
}

}  // namespace gridqa
