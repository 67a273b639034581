#include "gridqa/schema.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "gridqa/error.hpp"

namespace gridqa {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& message) {
  throw Error(ErrorCode::ParseError, "schema: " + message);
}

[[noreturn]] void validation_error(const std::string& message) {
  throw Error(ErrorCode::ValidationError, "schema: " + message);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_error(where + " is missing key '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) parse_error(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<AttributeDef> parse_attributes(const json& arr, const std::string& where) {
  if (!arr.is_array()) parse_error(where + ".attributes must be an array");
  std::vector<AttributeDef> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& a = arr[i];
    std::string at = where + ".attributes[" + std::to_string(i) + "]";
    if (!a.is_object()) parse_error(at + " must be an object");
    AttributeDef def;
    def.name = require_string(a, "name", at);
    std::string type = require_string(a, "datatype", at);
    auto dt = datatype_from_string(type);
    if (!dt) validation_error(at + " has unknown datatype '" + type + "'");
    def.datatype = *dt;
    if (auto u = a.find("unit"); u != a.end() && !u->is_null()) {
      if (!u->is_string()) parse_error(at + ".unit must be a string");
      def.unit = u->get<std::string>();
    }
    out.push_back(std::move(def));
  }
  return out;
}

json attributes_to_json(std::vector<AttributeDef> attrs) {
  std::sort(attrs.begin(), attrs.end(),
            [](const AttributeDef& a, const AttributeDef& b) { return a.name < b.name; });
  json out = json::array();
  for (const auto& a : attrs) {
    json j{{"name", a.name}, {"datatype", to_string(a.datatype)}};
    if (a.unit) j["unit"] = *a.unit;
    out.push_back(std::move(j));
  }
  return out;
}

void check_attribute_names(const std::vector<AttributeDef>& attrs, const std::string& owner) {
  std::set<std::string, std::less<>> seen;
  for (const auto& a : attrs) {
    if (a.name.empty()) validation_error(owner + " has an attribute with an empty name");
    if (!seen.insert(a.name).second)
      validation_error(owner + " declares attribute '" + a.name + "' twice");
  }
}

const AttributeDef* find_in(const std::vector<AttributeDef>& attrs, std::string_view name) {
  for (const auto& a : attrs)
    if (a.name == name) return &a;
  return nullptr;
}

}  // namespace

const AttributeDef* ClassDef::find_attribute(std::string_view attr) const {
  return find_in(attributes, attr);
}

const AttributeDef* EdgeTypeDef::find_attribute(std::string_view attr) const {
  return find_in(attributes, attr);
}

OntologySchema OntologySchema::load(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_error("document must be a JSON object");

  std::string version;
  if (auto v = doc.find("version"); v != doc.end()) {
    if (!v->is_string()) parse_error("version must be a string");
    version = v->get<std::string>();
  } else {
    parse_error("document is missing key 'version'");
  }

  const json& classes_json = require(doc, "classes", "document");
  if (!classes_json.is_array()) parse_error("classes must be an array");
  std::vector<ClassDef> classes;
  for (std::size_t i = 0; i < classes_json.size(); ++i) {
    const json& c = classes_json[i];
    std::string where = "classes[" + std::to_string(i) + "]";
    if (!c.is_object()) parse_error(where + " must be an object");
    ClassDef def;
    def.name = require_string(c, "name", where);
    std::string kind = require_string(c, "kind", where);
    if (kind == "abstract") def.kind = ClassKind::Abstract;
    else if (kind == "physical") def.kind = ClassKind::Physical;
    else validation_error(where + " has unknown kind '" + kind + "'");
    if (auto a = c.find("attributes"); a != c.end()) def.attributes = parse_attributes(*a, where);
    classes.push_back(std::move(def));
  }

  const json& edges_json = require(doc, "edge_types", "document");
  if (!edges_json.is_array()) parse_error("edge_types must be an array");
  std::vector<EdgeTypeDef> edges;
  for (std::size_t i = 0; i < edges_json.size(); ++i) {
    const json& e = edges_json[i];
    std::string where = "edge_types[" + std::to_string(i) + "]";
    if (!e.is_object()) parse_error(where + " must be an object");
    EdgeTypeDef def;
    def.name = require_string(e, "name", where);
    def.from_class = require_string(e, "from", where);
    def.to_class = require_string(e, "to", where);
    if (auto a = e.find("attributes"); a != e.end()) def.attributes = parse_attributes(*a, where);
    if (auto g = e.find("aggregated"); g != e.end()) {
      if (!g->is_boolean()) parse_error(where + ".aggregated must be a boolean");
      def.aggregated = g->get<bool>();
    }
    edges.push_back(std::move(def));
  }

  return build(std::move(version), std::move(classes), std::move(edges));
}

OntologySchema OntologySchema::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open schema file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load(buffer.str());
}

OntologySchema OntologySchema::build(std::string version, std::vector<ClassDef> classes,
                                     std::vector<EdgeTypeDef> edge_types) {
  OntologySchema schema;
  schema.version_ = std::move(version);
  schema.classes_ = std::move(classes);
  schema.edge_types_ = std::move(edge_types);
  for (std::size_t i = 0; i < schema.classes_.size(); ++i) {
    const auto& name = schema.classes_[i].name;
    if (name.empty()) validation_error("class names must be non-empty");
    if (!schema.class_index_.emplace(name, i).second)
      validation_error("duplicate class name '" + name + "'");
  }
  schema.validate();
  return schema;
}

void OntologySchema::validate() const {
  if (classes_.empty()) validation_error("schema declares no classes");
  for (const auto& c : classes_) check_attribute_names(c.attributes, "class '" + c.name + "'");

  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& e : edge_types_) {
    if (e.name.empty()) validation_error("edge type names must be non-empty");
    if (!find_class(e.from_class))
      validation_error("edge type '" + e.name + "' references missing class '" + e.from_class + "'");
    if (!find_class(e.to_class))
      validation_error("edge type '" + e.name + "' references missing class '" + e.to_class + "'");
    if (!seen.emplace(e.name, e.from_class, e.to_class).second)
      validation_error("duplicate edge type '" + e.name + "' (" + e.from_class + " -> " +
                       e.to_class + ")");
    check_attribute_names(e.attributes, "edge type '" + e.name + "'");
  }

  // Connectivity over the undirected class graph.
  std::map<std::string_view, std::vector<std::string_view>> links;
  for (const auto& e : edge_types_) {
    links[e.from_class].push_back(e.to_class);
    links[e.to_class].push_back(e.from_class);
  }
  std::set<std::string_view> reached{classes_.front().name};
  std::deque<std::string_view> frontier{classes_.front().name};
  while (!frontier.empty()) {
    auto cur = frontier.front();
    frontier.pop_front();
    for (auto next : links[cur])
      if (reached.insert(next).second) frontier.push_back(next);
  }
  if (reached.size() != classes_.size()) {
    for (const auto& c : classes_)
      if (!reached.count(c.name))
        validation_error("schema is disconnected: class '" + c.name + "' is unreachable from '" +
                         classes_.front().name + "'");
  }
}

const ClassDef* OntologySchema::find_class(std::string_view name) const {
  auto it = class_index_.find(name);
  return it == class_index_.end() ? nullptr : &classes_[it->second];
}

const AttributeDef* OntologySchema::find_attribute(std::string_view cls,
                                                   std::string_view attr) const {
  const ClassDef* c = find_class(cls);
  return c ? c->find_attribute(attr) : nullptr;
}

std::vector<const EdgeTypeDef*> OntologySchema::find_edge_types(std::string_view name) const {
  std::vector<const EdgeTypeDef*> out;
  for (const auto& e : edge_types_)
    if (e.name == name) out.push_back(&e);
  return out;
}

const EdgeTypeDef* OntologySchema::find_edge_type(std::string_view name, std::string_view from,
                                                  std::string_view to) const {
  for (const auto& e : edge_types_)
    if (e.name == name && e.from_class == from && e.to_class == to) return &e;
  return nullptr;
}

const AttributeDef* OntologySchema::first_attribute_of_type(std::string_view cls,
                                                            Datatype type) const {
  const ClassDef* c = find_class(cls);
  if (!c) return nullptr;
  for (const auto& a : c->attributes)
    if (a.datatype == type) return &a;
  return nullptr;
}

json OntologySchema::to_json() const {
  std::vector<const ClassDef*> classes;
  for (const auto& c : classes_) classes.push_back(&c);
  std::sort(classes.begin(), classes.end(),
            [](const ClassDef* a, const ClassDef* b) { return a->name < b->name; });
  std::vector<const EdgeTypeDef*> edges;
  for (const auto& e : edge_types_) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](const EdgeTypeDef* a, const EdgeTypeDef* b) {
    return std::tie(a->name, a->from_class, a->to_class) <
           std::tie(b->name, b->from_class, b->to_class);
  });

  json out;
  out["version"] = version_;
  out["classes"] = json::array();
  for (const auto* c : classes) {
    out["classes"].push_back({{"name", c->name},
                              {"kind", c->kind == ClassKind::Abstract ? "abstract" : "physical"},
                              {"attributes", attributes_to_json(c->attributes)}});
  }
  out["edge_types"] = json::array();
  for (const auto* e : edges) {
    out["edge_types"].push_back({{"name", e->name},
                                 {"from", e->from_class},
                                 {"to", e->to_class},
                                 {"attributes", attributes_to_json(e->attributes)},
                                 {"aggregated", e->aggregated}});
  }
  return out;
}

bool OntologySchema::operator==(const OntologySchema& other) const {
  return to_json() == other.to_json();
}

std::string_view to_string(Direction direction) {
  return direction == Direction::Forward ? "fwd" : "back";
}

SchemaGraph::SchemaGraph(const OntologySchema& schema) {
  for (const auto& c : schema.classes()) {
    classes_.push_back(c.name);
    adjacency_[c.name];
  }
  std::sort(classes_.begin(), classes_.end());
  for (const auto& e : schema.edge_types()) {
    adjacency_[e.from_class].push_back({e.name, e.to_class, Direction::Forward});
    adjacency_[e.to_class].push_back({e.name, e.from_class, Direction::Backward});
  }
  for (auto& [cls, list] : adjacency_) {
    std::sort(list.begin(), list.end(), [](const SchemaNeighbor& a, const SchemaNeighbor& b) {
      return std::tie(a.edge_type, a.neighbor, a.direction) <
             std::tie(b.edge_type, b.neighbor, b.direction);
    });
  }
}

bool SchemaGraph::contains(std::string_view cls) const { return adjacency_.count(cls) > 0; }

std::span<const SchemaNeighbor> SchemaGraph::neighbors(std::string_view cls) const {
  auto it = adjacency_.find(cls);
  if (it == adjacency_.end()) return {};
  return it->second;
}

std::map<std::string, std::size_t, std::less<>> SchemaGraph::distances_from(
    std::string_view cls) const {
  std::map<std::string, std::size_t, std::less<>> dist;
  if (!contains(cls)) return dist;
  dist.emplace(std::string(cls), 0);
  std::deque<std::string> frontier{std::string(cls)};
  while (!frontier.empty()) {
    std::string cur = std::move(frontier.front());
    frontier.pop_front();
    std::size_t d = dist.find(cur)->second;
    for (const auto& n : neighbors(cur)) {
      if (dist.emplace(n.neighbor, d + 1).second) frontier.push_back(n.neighbor);
    }
  }
  return dist;
}

std::optional<std::size_t> SchemaGraph::distance(std::string_view from, std::string_view to) const {
  auto dist = distances_from(from);
  auto it = dist.find(to);
  if (it == dist.end()) return std::nullopt;
  return it->second;
}

std::size_t SchemaGraph::diameter() const {
  std::size_t best = 0;
  for (const auto& c : classes_)
    for (const auto& [_, d] : distances_from(c)) best = std::max(best, d);
  return best;
}

}  // namespace gridqa
