#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridqa/value.hpp"

namespace gridqa {

/// Abstract classes model management objects (utilities, departments);
/// physical classes model equipment and its records.
enum class ClassKind { Abstract, Physical };

struct AttributeDef {
  std::string name;
  Datatype datatype = Datatype::String;
  std::optional<std::string> unit;

  bool operator==(const AttributeDef&) const = default;
};

struct ClassDef {
  std::string name;
  ClassKind kind = ClassKind::Physical;
  std::vector<AttributeDef> attributes;

  const AttributeDef* find_attribute(std::string_view attr) const;
  bool operator==(const ClassDef&) const = default;
};

struct EdgeTypeDef {
  std::string name;
  std::string from_class;
  std::string to_class;
  std::vector<AttributeDef> attributes;
  /// Relation folded onto a core node rather than modelled as its own class.
  bool aggregated = false;

  const AttributeDef* find_attribute(std::string_view attr) const;
  bool operator==(const EdgeTypeDef&) const = default;
};

/// Validated, immutable ontology: the graph the reasoner searches over.
///
/// Construction goes through `load` or `build`; both either return a schema
/// satisfying every invariant or throw (ParseError / ValidationError).
class OntologySchema {
 public:
  static OntologySchema load(std::string_view source);
  static OntologySchema load_file(const std::filesystem::path& path);
  static OntologySchema build(std::string version, std::vector<ClassDef> classes,
                              std::vector<EdgeTypeDef> edge_types);

  const std::string& version() const { return version_; }
  const std::vector<ClassDef>& classes() const { return classes_; }
  const std::vector<EdgeTypeDef>& edge_types() const { return edge_types_; }

  const ClassDef* find_class(std::string_view name) const;
  const AttributeDef* find_attribute(std::string_view cls, std::string_view attr) const;
  /// Edge type definitions sharing `name` (names may repeat across endpoints).
  std::vector<const EdgeTypeDef*> find_edge_types(std::string_view name) const;
  const EdgeTypeDef* find_edge_type(std::string_view name, std::string_view from,
                                    std::string_view to) const;

  /// First attribute of `cls` with the given datatype, in declaration order.
  const AttributeDef* first_attribute_of_type(std::string_view cls, Datatype type) const;

  /// Serializes to the schema document format with classes, attributes and
  /// edge types sorted by name, so equal schemas serialize identically.
  nlohmann::json to_json() const;

  /// Order-insensitive equality.
  bool operator==(const OntologySchema& other) const;

 private:
  OntologySchema() = default;
  void validate() const;

  std::string version_;
  std::vector<ClassDef> classes_;
  std::vector<EdgeTypeDef> edge_types_;
  std::map<std::string, std::size_t, std::less<>> class_index_;
};

enum class Direction { Forward, Backward };

std::string_view to_string(Direction direction);

struct SchemaNeighbor {
  std::string edge_type;
  std::string neighbor;
  Direction direction = Direction::Forward;

  bool operator==(const SchemaNeighbor&) const = default;
};

/// Undirected adjacency view over a schema. Each edge type A->B appears as
/// (e, B, Forward) under A and (e, A, Backward) under B. Neighbor lists are
/// sorted by edge type name, then neighbor name, then direction.
class SchemaGraph {
 public:
  explicit SchemaGraph(const OntologySchema& schema);

  const std::vector<std::string>& classes() const { return classes_; }
  bool contains(std::string_view cls) const;
  std::span<const SchemaNeighbor> neighbors(std::string_view cls) const;

  /// Hop distances from `cls` to every reachable class.
  std::map<std::string, std::size_t, std::less<>> distances_from(std::string_view cls) const;
  std::optional<std::size_t> distance(std::string_view from, std::string_view to) const;
  /// Longest shortest-path distance over all class pairs.
  std::size_t diameter() const;

 private:
  std::vector<std::string> classes_;
  std::map<std::string, std::vector<SchemaNeighbor>, std::less<>> adjacency_;
};

inline SchemaGraph schema_graph(const OntologySchema& schema) { return SchemaGraph(schema); }

}  // namespace gridqa
