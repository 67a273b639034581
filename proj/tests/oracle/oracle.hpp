#pragma once

// Brute-force reference implementations used as test oracles. Nothing here
// calls the reasoner, the compiler or the executor, and the instance-level
// evaluator reads only the raw vertex and edge lists of a store.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridqa/graph_store.hpp"
#include "gridqa/nlq.hpp"
#include "gridqa/reasoner.hpp"
#include "gridqa/schema.hpp"

namespace gridqa::oracle {

// ---------------------------------------------------------------------------
// Schema level

/// Undirected hop distance by breadth-first search over the edge type list.
std::optional<std::size_t> bfs_distance(const OntologySchema& schema, const std::string& from,
                                        const std::string& to);

/// Longest finite BFS distance over all class pairs.
std::size_t diameter(const OntologySchema& schema);

/// Shortest length over every simple path between two classes, found by
/// enumerating all of them. Exponential; small schemas only.
std::optional<std::size_t> enumerated_min_length(const OntologySchema& schema, const std::string& from,
                                                 const std::string& to);

/// Number of simple paths of minimum length between two classes.
std::size_t enumerated_min_count(const OntologySchema& schema, const std::string& from,
                                 const std::string& to);

/// True when every class is reachable from the first one.
bool connected(const OntologySchema& schema);

// ---------------------------------------------------------------------------
// Instance level

/// Thrown when a constraint literal cannot be compared with its attribute.
struct IllTyped : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Date that anchors duration windows for a question.
Date reference_date(const ParsedQuestion& parsed, Date evaluation_date);

/// Whether one vertex satisfies one constraint in isolation. Class and edge
/// constraints hold for any vertex bound at their plan node.
bool holds(const OntologySchema& schema, const Constraint& c, const Vertex& v, Date reference);

/// Exhaustive evaluator over the plan tree: for each vertex of the target
/// class, each "or" group is tried in turn. A group accepts when some
/// homomorphism of its positive constraints' plan subtree satisfies them all
/// and no negated constraint holds along its own root-to-anchor chain.
class Evaluator {
 public:
  explicit Evaluator(const GraphStore& store);

  /// Sorted ids of accepted target vertices.
  std::vector<std::string> answers(const ReasoningPlan& plan, const ParsedQuestion& parsed,
                                   Date evaluation_date) const;

  /// Sorted ids of every vertex of `cls`, from a full scan.
  std::vector<std::string> scan(const std::string& cls) const;

  /// Edge indexes touching a vertex, both directions.
  const std::vector<std::size_t>& incident(const std::string& id) const;

 private:
  struct Query;
  bool sat(const Query& q, std::size_t node, const Vertex& v) const;

  const GraphStore& store_;
  std::map<std::string, const Vertex*> by_id_;
  std::map<std::string, std::vector<std::size_t>> incident_;
  std::vector<std::size_t> none_;
};

}  // namespace gridqa::oracle
