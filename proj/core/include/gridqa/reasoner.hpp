#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridqa/nlq.hpp"
#include "gridqa/schema.hpp"

namespace gridqa {

/// One hop of a schema path. `direction` is relative to the stored edge
/// type: Backward means the hop runs against it (a reverse edge).
struct PathStep {
  std::string edge_type;
  Direction direction = Direction::Forward;
  std::string from;
  std::string to;

  bool reversed() const { return direction == Direction::Backward; }
  bool operator==(const PathStep&) const = default;
};

struct ReasoningPath {
  std::string start;  // anchor class
  std::vector<PathStep> steps;
  std::size_t anchor = 0;  // constraint index

  std::size_t length() const { return steps.size(); }
  std::string end() const { return steps.empty() ? start : steps.back().to; }
  std::vector<std::size_t> reversed_steps() const;
  bool operator==(const ReasoningPath&) const = default;
};

/// Shortest path over the undirected schema graph from `from` to `to`.
/// When a class on an `existing` path (other than `to`) lies on some shortest
/// route, the search splices onto that path at the closest such class.
/// Ties break on the lexicographically smallest (edge type, class, direction)
/// sequence. Throws NoPath.
ReasoningPath shortest_path(const SchemaGraph& graph, std::string_view from, std::string_view to,
                            std::span<const ReasoningPath> existing = {});

/// Node of the merged plan tree. Node 0 is the target; every other node
/// reaches its parent through `edge` in `direction`.
struct PlanNode {
  std::string cls;
  std::optional<std::size_t> parent;
  std::string edge;
  Direction direction = Direction::Forward;
  std::size_t depth = 0;

  bool operator==(const PlanNode&) const = default;
};

struct RouteStep {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string edge;
  bool reversed = false;

  bool operator==(const RouteStep&) const = default;
};

struct ReasoningPlan {
  std::string target;
  std::vector<std::size_t> order;     // constraint processing order
  std::vector<ReasoningPath> paths;   // indexed by constraint
  std::vector<PlanNode> nodes;        // merged tree, node 0 = target
  std::vector<std::size_t> bindings;  // constraint -> node
  std::vector<RouteStep> route;       // one walk covering every tree edge

  std::vector<std::size_t> children(std::size_t node) const;
  std::size_t max_depth() const;
  nlohmann::json to_json() const;
};

struct PlanOptions {
  /// Off: every constraint is searched independently before merging.
  bool reuse_paths = true;
};

/// Anchor class of a constraint and, for edge constraints, the forced first
/// hop across the named edge.
struct ConstraintAnchor {
  std::string cls;
  std::optional<PathStep> forced;
};

ConstraintAnchor constraint_anchor(const OntologySchema& schema, const SchemaGraph& graph,
                                   const Constraint& constraint, std::string_view target);

/// Throws UnresolvedTarget when the question has no schema target, NoPath
/// when an anchor is unreachable.
ReasoningPlan plan(const OntologySchema& schema, const SchemaGraph& graph,
                   const ParsedQuestion& parsed, PlanOptions options = {});

}  // namespace gridqa
