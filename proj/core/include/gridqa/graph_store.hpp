#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridqa/schema.hpp"
#include "gridqa/value.hpp"

namespace gridqa {

using AttributeMap = std::map<std::string, Value, std::less<>>;

struct Vertex {
  std::string id;
  std::string cls;
  AttributeMap attrs;

  const Value* attr(std::string_view name) const;
};

struct Edge {
  std::string src;
  std::string dst;
  std::string type;
  AttributeMap attrs;
};

enum class EdgeDirection { Out, In, Both };

std::string_view to_string(EdgeDirection direction);

enum class Comparator { Eq, Neq, Lt, Le, Gt, Ge, Contains, Between };

std::string_view to_string(Comparator op);

/// Attribute filter. `Between` is inclusive on both ends and uses `upper`;
/// `Contains` is a case-insensitive substring test on strings.
struct Predicate {
  Comparator op = Comparator::Eq;
  Value value;
  std::optional<Value> upper;

  bool matches(const Value& attribute_value) const;
  std::string describe() const;
};

/// Dense vertex handle. Indices follow ascending vertex id order, so sorting
/// by index sorts by id.
using VertexIndex = std::uint32_t;
using EdgeTypeId = std::uint32_t;

struct AdjacentEdge {
  std::uint32_t edge = 0;
  VertexIndex neighbor = 0;
  EdgeTypeId type = 0;
};

struct Neighbor {
  const Edge* edge = nullptr;
  const Vertex* vertex = nullptr;
  bool outgoing = true;
};

/// Read-only in-memory property graph conforming to an ontology schema.
///
/// Holds a class index, one ordered index per (class, attribute), and
/// adjacency in both directions. Loading is all-or-nothing: any violation
/// throws and no store is produced.
class GraphStore {
 public:
  static GraphStore load(std::shared_ptr<const OntologySchema> schema, std::istream& vertices,
                         std::istream& edges);
  static GraphStore load_files(std::shared_ptr<const OntologySchema> schema,
                               const std::filesystem::path& vertices,
                               const std::filesystem::path& edges);
  static GraphStore build(std::shared_ptr<const OntologySchema> schema,
                          std::vector<Vertex> vertices, std::vector<Edge> edges);

  const OntologySchema& schema() const { return *schema_; }
  std::shared_ptr<const OntologySchema> schema_ptr() const { return schema_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Vertex> vertices() const { return vertices_; }
  std::span<const Edge> edges() const { return edges_; }

  std::optional<VertexIndex> index_of(std::string_view id) const;
  const Vertex& vertex(VertexIndex index) const { return vertices_[index]; }
  const Vertex* find_vertex(std::string_view id) const;
  /// Throws UnknownVertex.
  const Vertex& vertex(std::string_view id) const;
  const Edge& edge(std::uint32_t index) const { return edges_[index]; }

  /// Members of a class, ascending by id. Empty for unknown classes.
  std::span<const VertexIndex> class_members(std::string_view cls) const;

  std::optional<EdgeTypeId> edge_type_id(std::string_view name) const;
  const std::string& edge_type_name(EdgeTypeId id) const { return edge_type_names_[id]; }

  /// Adjacency sorted by (edge type name, neighbor id).
  std::span<const AdjacentEdge> out_edges(VertexIndex v) const { return out_[v]; }
  std::span<const AdjacentEdge> in_edges(VertexIndex v) const { return in_[v]; }

  /// Neighbors of a vertex in (edge type name, neighbor id) order.
  /// Throws UnknownVertex.
  std::vector<Neighbor> neighbors(std::string_view vertex_id,
                                  std::optional<std::string_view> edge_type,
                                  EdgeDirection direction) const;

  /// Ids of `cls` vertices whose `attr` satisfies `predicate`, ascending.
  /// Throws UnknownAttribute or TypeMismatch.
  std::vector<std::string> vertices_by_attr(std::string_view cls, std::string_view attr,
                                            const Predicate& predicate) const;
  /// Index-level form of vertices_by_attr.
  std::vector<VertexIndex> match_attribute(std::string_view cls, std::string_view attr,
                                           const Predicate& predicate) const;

  /// Normalizes a predicate's literal(s) to the attribute's datatype.
  /// Throws UnknownAttribute or TypeMismatch.
  Predicate typed_predicate(std::string_view cls, std::string_view attr,
                            const Predicate& predicate) const;

 private:
  using AttributeIndex = std::map<Value, std::vector<VertexIndex>>;

  GraphStore() = default;

  std::shared_ptr<const OntologySchema> schema_;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::map<std::string, VertexIndex, std::less<>> id_index_;
  std::map<std::string, std::vector<VertexIndex>, std::less<>> class_index_;
  std::map<std::string, AttributeIndex, std::less<>> attribute_index_;  // key "Class.attr"
  std::vector<std::string> edge_type_names_;
  std::map<std::string, EdgeTypeId, std::less<>> edge_type_ids_;
  std::vector<std::vector<AdjacentEdge>> out_;
  std::vector<std::vector<AdjacentEdge>> in_;
};

}  // namespace gridqa
