#pragma once

// Random schemas, graphs and questions for property tests.

#include <cstddef>
#include <memory>
#include <random>

#include "gridqa/graph_store.hpp"
#include "gridqa/nlq.hpp"
#include "gridqa/schema.hpp"

namespace gridqa::oracle {

using Rng = std::mt19937_64;

/// Connected schema: a random spanning tree over `classes` classes plus
/// `extra_edges` further edge types (parallel types allowed, no self loops).
/// Every class carries name/level/since attributes; some add rating/active.
OntologySchema random_schema(Rng& rng, std::size_t classes, std::size_t extra_edges);

/// Vertices spread over all classes; each edge type gets about
/// `edges_per_type` random instances.
GraphStore random_store(std::shared_ptr<const OntologySchema> schema, Rng& rng, std::size_t vertices,
                        std::size_t edges_per_type);

struct QuestionShape {
  std::size_t max_constraints = 4;
  bool allow_or = true;
  bool allow_not = true;
  bool allow_edges = true;
};

/// Well-typed question with a random target and literals sampled from the
/// store so that constraints are neither always nor never satisfiable.
ParsedQuestion random_question(Rng& rng, const GraphStore& store, QuestionShape shape = {});

}  // namespace gridqa::oracle
