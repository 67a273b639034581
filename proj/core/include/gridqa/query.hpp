#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridqa/graph_store.hpp"
#include "gridqa/nlq.hpp"
#include "gridqa/reasoner.hpp"

namespace gridqa {

/// Test applied to the vertex bound at one plan node.
struct NodePredicate {
  std::size_t constraint = 0;
  enum class Kind { Attribute, Instance } kind = Kind::Attribute;
  std::string attribute;
  Predicate predicate;     // Attribute
  std::string vertex;      // Instance
  bool negate_instance = false;

  std::string describe(const std::string& var) const;
};

/// Existence check hanging off a node: some neighbor across `edge` matches
/// `predicates` and every nested branch.
struct FilterBranch {
  std::size_t node = 0;
  std::string edge;
  EdgeDirection direction = EdgeDirection::Out;
  std::string cls;
  std::vector<NodePredicate> predicates;
  std::vector<FilterBranch> children;
};

struct Hop {
  std::size_t from_node = 0;
  std::size_t node = 0;
  std::string edge;
  EdgeDirection direction = EdgeDirection::Out;
  std::string cls;
  bool reversed = false;
  std::vector<NodePredicate> predicates;
  std::vector<FilterBranch> filters;
};

struct AntiJoin {
  std::size_t constraint = 0;
  std::vector<NodePredicate> root_predicates;
  std::optional<FilterBranch> branch;
};

/// One disjunct: a conjunction of positive constraints sharing the plan tree
/// plus independent anti-joins for negated constraints.
struct GroupPlan {
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negated;
  std::optional<std::size_t> seed_constraint;
  std::size_t seed_node = 0;
  std::string seed_class;
  std::vector<NodePredicate> seed_predicates;
  std::vector<FilterBranch> seed_filters;
  std::vector<Hop> hops;
  std::vector<AntiJoin> anti_joins;
};

struct TraversalPlan {
  std::string target;
  std::optional<std::string> target_attribute;
  QuestionType type = QuestionType::Selection;
  std::size_t constraint_count = 0;
  Date reference_date{};
  std::vector<GroupPlan> groups;
  std::vector<std::optional<std::size_t>> node_parents;  // plan tree shape
  std::vector<std::string> node_classes;
  std::vector<std::size_t> bindings;  // constraint -> node

  std::string pseudo_query() const;
  nlohmann::json to_json() const;
};

/// Resolves a constraint comparator to a store predicate; durations and
/// years become inclusive date ranges ending at `reference`.
Predicate resolve_predicate(const Constraint& constraint, Date reference);

/// Reference date for duration windows: Dec 31 of the question's first
/// in-year constraint, else `evaluation_date`.
Date reference_date(const ParsedQuestion& parsed, Date evaluation_date);

/// Throws InconsistentPlan when plan and question disagree.
TraversalPlan compile(const ReasoningPlan& plan, const ParsedQuestion& parsed,
                      const GraphStore& store, Date evaluation_date);

struct BindingRow {
  std::string answer;
  std::size_t constraint = 0;
  std::vector<std::string> witness_ids;  // anchor side first; empty for negated constraints
};

struct ExecutionStats {
  std::size_t hops = 0;
  std::size_t vertices_touched = 0;
  double elapsed_ms = 0;
};

struct AnswerGraph {
  std::string target;
  QuestionType type = QuestionType::Selection;
  std::optional<std::string> target_attribute;
  std::vector<VertexIndex> answers;            // ascending id
  std::vector<VertexIndex> subgraph_vertices;  // ascending id
  std::vector<std::uint32_t> subgraph_edges;   // ascending edge index
  std::vector<BindingRow> bindings;
  ExecutionStats stats;
  std::string pseudo_query;

  bool empty() const { return answers.empty(); }
  std::vector<std::string> answer_ids(const GraphStore& store) const;
  /// `with_timing` = false drops elapsed time for byte-stable comparisons.
  nlohmann::json to_json(const GraphStore& store, bool with_timing = true) const;
};

AnswerGraph execute(const GraphStore& store, const TraversalPlan& plan);

nlohmann::json vertex_to_json(const Vertex& vertex);
nlohmann::json edge_to_json(const Edge& edge);

}  // namespace gridqa
