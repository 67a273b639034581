#include "gridqa/graph_store.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>

#include <nlohmann/json.hpp>

#include "gridqa/error.hpp"

namespace gridqa {

using nlohmann::json;

const Value* Vertex::attr(std::string_view name) const {
  auto it = attrs.find(name);
  return it == attrs.end() ? nullptr : &it->second;
}

std::string_view to_string(EdgeDirection direction) {
  switch (direction) {
    case EdgeDirection::Out: return "out";
    case EdgeDirection::In: return "in";
    case EdgeDirection::Both: return "both";
  }
  return "both";
}

std::string_view to_string(Comparator op) {
  switch (op) {
    case Comparator::Eq: return "==";
    case Comparator::Neq: return "!=";
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
    case Comparator::Contains: return "CONTAINS";
    case Comparator::Between: return "BETWEEN";
  }
  return "==";
}

bool Predicate::matches(const Value& attribute_value) const {
  if (op == Comparator::Contains) {
    const auto* hay = std::get_if<std::string>(&attribute_value);
    const auto* needle = std::get_if<std::string>(&value);
    if (!hay || !needle) return false;
    return to_lower(*hay).find(to_lower(*needle)) != std::string::npos;
  }
  auto ord = compare(attribute_value, value);
  if (!ord) return false;
  switch (op) {
    case Comparator::Eq: return *ord == 0;
    case Comparator::Neq: return *ord != 0;
    case Comparator::Lt: return *ord < 0;
    case Comparator::Le: return *ord <= 0;
    case Comparator::Gt: return *ord > 0;
    case Comparator::Ge: return *ord >= 0;
    case Comparator::Between: {
      if (!upper || *ord < 0) return false;
      auto hi = compare(attribute_value, *upper);
      return hi && *hi <= 0;
    }
    default: return false;
  }
}

std::string Predicate::describe() const {
  auto quote = [](const Value& v) {
    if (std::holds_alternative<std::string>(v) || std::holds_alternative<Date>(v))
      return "'" + to_string(v) + "'";
    return to_string(v);
  };
  if (op == Comparator::Between && upper)
    return "BETWEEN " + quote(value) + " AND " + quote(*upper);
  return std::string(to_string(op)) + " " + quote(value);
}

namespace {

[[noreturn]] void violation(const std::string& message) {
  throw Error(ErrorCode::SchemaViolation, message);
}

AttributeMap typed_attributes(const json& attrs, const std::vector<AttributeDef>& defs,
                              const std::string& owner) {
  AttributeMap out;
  if (attrs.is_null()) return out;
  if (!attrs.is_object()) throw Error(ErrorCode::ParseError, owner + ": attrs must be an object");
  for (auto it = attrs.begin(); it != attrs.end(); ++it) {
    const AttributeDef* def = nullptr;
    for (const auto& d : defs)
      if (d.name == it.key()) def = &d;
    if (!def) violation(owner + ": unknown attribute '" + it.key() + "'");
    auto v = value_from_json(it.value(), def->datatype);
    if (!v)
      violation(owner + ": attribute '" + it.key() + "' is not a valid " +
                std::string(to_string(def->datatype)));
    out.emplace(it.key(), std::move(*v));
  }
  return out;
}

template <typename F>
void for_each_json_line(std::istream& in, const char* what, F&& f) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, std::string(what) + " line " + std::to_string(lineno) +
                                             ": malformed JSON: " + e.what());
    }
    if (!obj.is_object())
      throw Error(ErrorCode::ParseError,
                  std::string(what) + " line " + std::to_string(lineno) + ": expected an object");
    f(obj, std::string(what) + " line " + std::to_string(lineno));
  }
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw Error(ErrorCode::ParseError, where + ": '" + key + "' must be a string");
  return it->get<std::string>();
}

json attrs_field(const json& obj) {
  auto it = obj.find("attrs");
  return it == obj.end() ? json() : *it;
}

}  // namespace

GraphStore GraphStore::load(std::shared_ptr<const OntologySchema> schema, std::istream& vertices,
                            std::istream& edges) {
  std::vector<Vertex> vs;
  for_each_json_line(vertices, "vertices", [&](const json& obj, const std::string& where) {
    Vertex v;
    v.id = string_field(obj, "id", where);
    v.cls = string_field(obj, "class", where);
    const ClassDef* cls = schema->find_class(v.cls);
    if (!cls) violation(where + ": unknown class '" + v.cls + "'");
    v.attrs = typed_attributes(attrs_field(obj), cls->attributes, where);
    vs.push_back(std::move(v));
  });

  std::vector<Edge> es;
  for_each_json_line(edges, "edges", [&](const json& obj, const std::string& where) {
    Edge e;
    e.src = string_field(obj, "src", where);
    e.dst = string_field(obj, "dst", where);
    e.type = string_field(obj, "type", where);
    auto defs = schema->find_edge_types(e.type);
    if (defs.empty()) violation(where + ": unknown edge type '" + e.type + "'");
    // Attribute typing needs the definition; pick by endpoints once vertices are known.
    std::vector<AttributeDef> attr_defs;
    for (const auto* d : defs)
      for (const auto& a : d->attributes) attr_defs.push_back(a);
    e.attrs = typed_attributes(attrs_field(obj), attr_defs, where);
    es.push_back(std::move(e));
  });

  return build(std::move(schema), std::move(vs), std::move(es));
}

GraphStore GraphStore::load_files(std::shared_ptr<const OntologySchema> schema,
                                  const std::filesystem::path& vertices,
                                  const std::filesystem::path& edges) {
  std::ifstream vin(vertices);
  if (!vin) throw Error(ErrorCode::IoError, "cannot open vertex file " + vertices.string());
  std::ifstream ein(edges);
  if (!ein) throw Error(ErrorCode::IoError, "cannot open edge file " + edges.string());
  return load(std::move(schema), vin, ein);
}

GraphStore GraphStore::build(std::shared_ptr<const OntologySchema> schema,
                             std::vector<Vertex> vertices, std::vector<Edge> edges) {
  GraphStore store;
  store.schema_ = std::move(schema);
  const OntologySchema& sc = *store.schema_;

  std::sort(vertices.begin(), vertices.end(),
            [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vertex& v = vertices[i];
    if (v.id.empty()) violation("vertex with empty id");
    if (i > 0 && vertices[i - 1].id == v.id) violation("duplicate vertex id '" + v.id + "'");
    const ClassDef* cls = sc.find_class(v.cls);
    if (!cls) violation("vertex '" + v.id + "': unknown class '" + v.cls + "'");
    for (const auto& [name, value] : v.attrs) {
      const AttributeDef* def = cls->find_attribute(name);
      if (!def) violation("vertex '" + v.id + "': unknown attribute '" + name + "'");
      if (datatype_of(value) != def->datatype)
        violation("vertex '" + v.id + "': attribute '" + name + "' is not a " +
                  std::string(to_string(def->datatype)));
    }
  }
  store.vertices_ = std::move(vertices);
  for (std::size_t i = 0; i < store.vertices_.size(); ++i) {
    const Vertex& v = store.vertices_[i];
    auto idx = static_cast<VertexIndex>(i);
    store.id_index_.emplace(v.id, idx);
    store.class_index_[v.cls].push_back(idx);
    for (const auto& [name, value] : v.attrs)
      store.attribute_index_[v.cls + "." + name][value].push_back(idx);
  }

  std::set<std::string> names;
  for (const auto& e : sc.edge_types()) names.insert(e.name);
  for (const auto& n : names) {
    store.edge_type_ids_.emplace(n, static_cast<EdgeTypeId>(store.edge_type_names_.size()));
    store.edge_type_names_.push_back(n);
  }

  store.out_.resize(store.vertices_.size());
  store.in_.resize(store.vertices_.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    auto src = store.index_of(e.src);
    auto dst = store.index_of(e.dst);
    if (!src) violation("edge " + e.type + ": dangling endpoint '" + e.src + "'");
    if (!dst) violation("edge " + e.type + ": dangling endpoint '" + e.dst + "'");
    auto type = store.edge_type_id(e.type);
    if (!type) violation("unknown edge type '" + e.type + "'");
    const auto& src_cls = store.vertices_[*src].cls;
    const auto& dst_cls = store.vertices_[*dst].cls;
    const EdgeTypeDef* def = sc.find_edge_type(e.type, src_cls, dst_cls);
    if (!def)
      violation("edge " + e.type + " from '" + e.src + "' to '" + e.dst + "': no edge type " +
                e.type + " connects " + src_cls + " to " + dst_cls);
    for (const auto& [name, value] : e.attrs) {
      const AttributeDef* adef = def->find_attribute(name);
      if (!adef || datatype_of(value) != adef->datatype)
        violation("edge " + e.type + " from '" + e.src + "': bad attribute '" + name + "'");
    }
    auto ei = static_cast<std::uint32_t>(i);
    store.out_[*src].push_back({ei, *dst, *type});
    store.in_[*dst].push_back({ei, *src, *type});
  }
  store.edges_ = std::move(edges);

  auto order = [](const AdjacentEdge& a, const AdjacentEdge& b) {
    return std::tie(a.type, a.neighbor, a.edge) < std::tie(b.type, b.neighbor, b.edge);
  };
  for (auto& list : store.out_) std::sort(list.begin(), list.end(), order);
  for (auto& list : store.in_) std::sort(list.begin(), list.end(), order);
  return store;
}

std::optional<VertexIndex> GraphStore::index_of(std::string_view id) const {
  auto it = id_index_.find(id);
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

const Vertex* GraphStore::find_vertex(std::string_view id) const {
  auto idx = index_of(id);
  return idx ? &vertices_[*idx] : nullptr;
}

const Vertex& GraphStore::vertex(std::string_view id) const {
  const Vertex* v = find_vertex(id);
  if (!v) throw Error(ErrorCode::UnknownVertex, "unknown vertex '" + std::string(id) + "'");
  return *v;
}

std::span<const VertexIndex> GraphStore::class_members(std::string_view cls) const {
  auto it = class_index_.find(cls);
  if (it == class_index_.end()) return {};
  return it->second;
}

std::optional<EdgeTypeId> GraphStore::edge_type_id(std::string_view name) const {
  auto it = edge_type_ids_.find(name);
  if (it == edge_type_ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<Neighbor> GraphStore::neighbors(std::string_view vertex_id,
                                            std::optional<std::string_view> edge_type,
                                            EdgeDirection direction) const {
  auto idx = index_of(vertex_id);
  if (!idx) throw Error(ErrorCode::UnknownVertex, "unknown vertex '" + std::string(vertex_id) + "'");
  std::optional<EdgeTypeId> type;
  if (edge_type) {
    type = edge_type_id(*edge_type);
    if (!type) return {};
  }
  struct Entry {
    AdjacentEdge adj;
    bool outgoing;
  };
  std::vector<Entry> entries;
  auto collect = [&](std::span<const AdjacentEdge> list, bool outgoing) {
    for (const auto& a : list)
      if (!type || a.type == *type) entries.push_back({a, outgoing});
  };
  if (direction != EdgeDirection::In) collect(out_[*idx], true);
  if (direction != EdgeDirection::Out) collect(in_[*idx], false);
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.adj.type, a.adj.neighbor, a.adj.edge, b.outgoing) <
           std::tie(b.adj.type, b.adj.neighbor, b.adj.edge, a.outgoing);
  });
  // A self-loop shows up in both lists; report each edge once.
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const Entry& a, const Entry& b) { return a.adj.edge == b.adj.edge; }),
                entries.end());
  std::vector<Neighbor> out;
  out.reserve(entries.size());
  for (const auto& e : entries)
    out.push_back({&edges_[e.adj.edge], &vertices_[e.adj.neighbor], e.outgoing});
  return out;
}

Predicate GraphStore::typed_predicate(std::string_view cls, std::string_view attr,
                                      const Predicate& predicate) const {
  const AttributeDef* def = schema_->find_attribute(cls, attr);
  if (!def)
    throw Error(ErrorCode::UnknownAttribute,
                "unknown attribute '" + std::string(cls) + "." + std::string(attr) + "'");
  auto where = std::string(cls) + "." + std::string(attr);
  if (predicate.op == Comparator::Contains) {
    if (def->datatype != Datatype::String || !std::holds_alternative<std::string>(predicate.value))
      throw Error(ErrorCode::TypeMismatch, "CONTAINS needs a string attribute and literal: " + where);
    return predicate;
  }
  Predicate typed = predicate;
  auto v = coerce(predicate.value, def->datatype);
  if (!v)
    throw Error(ErrorCode::TypeMismatch, "literal " + to_string(predicate.value) +
                                             " does not match " + where + " (" +
                                             std::string(to_string(def->datatype)) + ")");
  typed.value = std::move(*v);
  if (predicate.op == Comparator::Between) {
    if (!predicate.upper)
      throw Error(ErrorCode::TypeMismatch, "BETWEEN needs an upper bound: " + where);
    auto u = coerce(*predicate.upper, def->datatype);
    if (!u) throw Error(ErrorCode::TypeMismatch, "upper bound does not match " + where);
    typed.upper = std::move(*u);
  }
  return typed;
}

std::vector<VertexIndex> GraphStore::match_attribute(std::string_view cls, std::string_view attr,
                                                     const Predicate& predicate) const {
  Predicate p = typed_predicate(cls, attr, predicate);
  std::string key = std::string(cls) + "." + std::string(attr);
  auto it = attribute_index_.find(key);
  std::vector<VertexIndex> out;
  if (it == attribute_index_.end()) return out;
  const AttributeIndex& index = it->second;

  auto append = [&](AttributeIndex::const_iterator first, AttributeIndex::const_iterator last) {
    for (; first != last; ++first) out.insert(out.end(), first->second.begin(), first->second.end());
  };
  switch (p.op) {
    case Comparator::Eq: {
      auto hit = index.find(p.value);
      if (hit != index.end()) out = hit->second;
      break;
    }
    case Comparator::Neq: {
      auto hit = index.find(p.value);
      append(index.begin(), hit);
      if (hit != index.end()) append(std::next(hit), index.end());
      else append(index.end(), index.end());
      break;
    }
    case Comparator::Lt: append(index.begin(), index.lower_bound(p.value)); break;
    case Comparator::Le: append(index.begin(), index.upper_bound(p.value)); break;
    case Comparator::Gt: append(index.upper_bound(p.value), index.end()); break;
    case Comparator::Ge: append(index.lower_bound(p.value), index.end()); break;
    case Comparator::Between:
      if (!(*p.upper < p.value)) append(index.lower_bound(p.value), index.upper_bound(*p.upper));
      break;
    case Comparator::Contains:
      for (auto i = index.begin(); i != index.end(); ++i)
        if (p.matches(i->first)) out.insert(out.end(), i->second.begin(), i->second.end());
      break;
  }
  if (out.size() * 8 < vertices_.size()) {
    std::sort(out.begin(), out.end());
    return out;
  }
  // Dense result: a bitmap pass beats a comparison sort.
  std::vector<char> mark(vertices_.size(), 0);
  for (VertexIndex v : out) mark[v] = 1;
  out.clear();
  for (VertexIndex v = 0; v < vertices_.size(); ++v)
    if (mark[v]) out.push_back(v);
  return out;
}

std::vector<std::string> GraphStore::vertices_by_attr(std::string_view cls, std::string_view attr,
                                                      const Predicate& predicate) const {
  std::vector<std::string> ids;
  for (VertexIndex v : match_attribute(cls, attr, predicate)) ids.push_back(vertices_[v].id);
  return ids;
}

}  // namespace gridqa
