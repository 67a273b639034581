#pragma once

// Shared fixture access for the test binaries.

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "gridqa/corpus.hpp"
#include "gridqa/engine.hpp"

namespace gridqa::testing {

inline std::filesystem::path fixtures_dir() { return GRIDQA_FIXTURES_DIR; }
inline std::filesystem::path demo_dir() { return GRIDQA_DEMO_DIR; }

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Builds an engine straight from generated text, without touching disk.
inline Engine engine_from(const GeneratedData& data, EngineOptions options = {}) {
  auto schema = std::make_shared<const OntologySchema>(OntologySchema::load(data.schema));
  std::istringstream vertices(data.vertices), edges(data.edges);
  auto store = std::make_shared<const GraphStore>(GraphStore::load(schema, vertices, edges));
  auto lexicon = std::make_shared<const Lexicon>(Lexicon::load(data.lexicon, *schema, store.get()));
  return Engine(schema, store, lexicon, options);
}

/// The seed-42, 10k-vertex dataset with its 50-case corpus.
inline const GeneratedData& seed42() {
  static const GeneratedData data = generate(GenerateOptions{});
  return data;
}

inline const Engine& seed42_engine() {
  static const Engine engine = engine_from(seed42());
  return engine;
}

inline const Engine& demo_engine() {
  static const Engine engine = Engine::open(demo_dir());
  return engine;
}

inline const char* golden_question() {
  return "Which transformers in the California power grid have oil leakage within five years of "
         "operation in 2019?";
}

}  // namespace gridqa::testing
