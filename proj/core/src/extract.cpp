#include <algorithm>
#include <limits>
#include <tuple>

#include "gridqa/error.hpp"
#include "gridqa/nlq.hpp"

namespace gridqa {

using nlohmann::json;

std::string_view to_string(QuestionType type) {
  switch (type) {
    case QuestionType::Selection: return "selection";
    case QuestionType::Count: return "count";
    case QuestionType::List: return "list";
  }
  return "selection";
}

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::Class: return "class";
    case ConstraintKind::Instance: return "instance";
    case ConstraintKind::Attribute: return "attribute";
    case ConstraintKind::Edge: return "edge";
  }
  return "class";
}

namespace {

constexpr std::string_view kComparisons[] = {"eq", "neq", "lt",     "le",      "gt",
                                             "ge", "within_duration", "in_year", "contains"};

std::optional<ConstraintKind> constraint_kind_from_string(std::string_view s) {
  for (auto k : {ConstraintKind::Class, ConstraintKind::Instance, ConstraintKind::Attribute,
                 ConstraintKind::Edge})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::optional<Connector> connector_from_string(std::string_view s) {
  for (auto c : {Connector::And, Connector::Or, Connector::Not})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Comparison cmp) { return kComparisons[static_cast<std::size_t>(cmp)]; }

std::optional<Comparison> comparison_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kComparisons); ++i)
    if (kComparisons[i] == name) return static_cast<Comparison>(i);
  return std::nullopt;
}

std::string_view to_string(Connector connector) {
  switch (connector) {
    case Connector::And: return "and";
    case Connector::Or: return "or";
    case Connector::Not: return "not";
  }
  return "and";
}

std::string Constraint::merge_key() const {
  std::string anchor;
  switch (kind) {
    case ConstraintKind::Class: anchor = cls; break;
    case ConstraintKind::Instance: anchor = vertex; break;
    case ConstraintKind::Attribute: anchor = cls + "." + attribute; break;
    case ConstraintKind::Edge: anchor = edge; break;
  }
  return std::string(to_string(kind)) + ":" + anchor + ":" + std::string(to_string(cmp));
}

std::string Constraint::describe() const {
  auto literal = [&] {
    if (std::holds_alternative<std::string>(value) || std::holds_alternative<Date>(value))
      return "'" + to_string(value) + "'";
    return to_string(value);
  };
  switch (kind) {
    case ConstraintKind::Class: return "class " + cls;
    case ConstraintKind::Edge: return "edge " + edge;
    case ConstraintKind::Instance:
      return cls + " " + (cmp == Comparison::Neq ? "!= " : "== ") + vertex;
    case ConstraintKind::Attribute: break;
  }
  std::string op;
  switch (cmp) {
    case Comparison::Eq: op = "=="; break;
    case Comparison::Neq: op = "!="; break;
    case Comparison::Lt: op = "<"; break;
    case Comparison::Le: op = "<="; break;
    case Comparison::Gt: op = ">"; break;
    case Comparison::Ge: op = ">="; break;
    case Comparison::WithinDuration: op = "within"; break;
    case Comparison::InYear: op = "in year"; break;
    case Comparison::Contains: op = "contains"; break;
  }
  return cls + "." + attribute + " " + op + " " + literal();
}

bool Constraint::operator==(const Constraint& o) const {
  return kind == o.kind && cls == o.cls && attribute == o.attribute && edge == o.edge &&
         vertex == o.vertex && cmp == o.cmp && value == o.value && connector == o.connector;
}

json to_json(const Constraint& c) {
  json j{{"kind", to_string(c.kind)},
         {"class", c.cls},
         {"comparator", to_string(c.cmp)},
         {"connector", to_string(c.connector)},
         {"position", c.position},
         {"surface", c.surface}};
  if (c.kind == ConstraintKind::Attribute) j["attribute"] = c.attribute;
  if (c.kind == ConstraintKind::Edge) j["edge"] = c.edge;
  if (c.kind == ConstraintKind::Instance) j["vertex"] = c.vertex;
  if (c.kind == ConstraintKind::Attribute) {
    j["value"] = value_to_json(c.value);
    auto dt = datatype_of(c.value);
    j["value_type"] = dt ? std::string(to_string(*dt)) : std::string("duration");
  }
  return j;
}

Constraint constraint_from_json(const json& j) {
  auto fail = [](const std::string& m) -> Constraint {
    throw Error(ErrorCode::ParseError, "constraint: " + m);
  };
  if (!j.is_object()) return fail("must be an object");
  Constraint c;
  auto kind = constraint_kind_from_string(j.value("kind", ""));
  auto cmp = comparison_from_string(j.value("comparator", "eq"));
  auto conn = connector_from_string(j.value("connector", "and"));
  if (!kind || !cmp || !conn) return fail("unknown kind, comparator or connector");
  c.kind = *kind;
  c.cmp = *cmp;
  c.connector = *conn;
  c.cls = j.value("class", "");
  c.attribute = j.value("attribute", "");
  c.edge = j.value("edge", "");
  c.vertex = j.value("vertex", "");
  if (c.kind == ConstraintKind::Instance) c.value = Value{c.vertex};
  c.position = j.value("position", std::size_t{0});
  c.surface = j.value("surface", "");
  if (c.kind == ConstraintKind::Attribute) {
    std::string type = j.value("value_type", "string");
    const json& v = j.at("value");
    if (type == "duration") {
      std::string unit = v.at("unit").get<std::string>();
      Duration d{v.at("amount").get<std::int64_t>(),
                 unit == "day" ? Duration::Unit::Day
                               : unit == "month" ? Duration::Unit::Month : Duration::Unit::Year};
      c.value = d;
    } else {
      auto dt = datatype_from_string(type);
      if (!dt) return fail("unknown value_type '" + type + "'");
      auto val = value_from_json(v, *dt);
      if (!val) return fail("value does not match value_type");
      c.value = *val;
    }
  }
  return c;
}

json ParsedQuestion::to_json() const {
  json j{{"raw", raw}, {"constraints", json::array()}};
  if (target) {
    json t{{"class", target->cls}, {"type", to_string(target->type)}};
    if (target->attribute) t["attribute"] = *target->attribute;
    j["target"] = t;
  } else {
    j["target"] = nullptr;
  }
  for (const auto& c : constraints) j["constraints"].push_back(gridqa::to_json(c));
  return j;
}

// ---------------------------------------------------------------------------

namespace {

/// Tree node representing a tag: its shallowest token, ties to the last.
std::size_t tag_node(const DependencyTree& tree, const EntityTag& tag) {
  std::size_t best = tag.end - 1;
  for (std::size_t t = tag.begin; t < tag.end; ++t)
    if (tree.depth(t) < tree.depth(best)) best = t;
  return best;
}

std::pair<std::string, std::string> split_ref(const std::string& ref) {
  auto dot = ref.find('.');
  if (dot == std::string::npos) return {ref, ""};
  return {ref.substr(0, dot), ref.substr(dot + 1)};
}

std::optional<Target> target_from_tag(const EntityTag& tag, std::size_t index,
                                      const OntologySchema& schema) {
  Target t;
  t.tag = index;
  switch (tag.kind) {
    case TagKind::Class:
      t.cls = tag.binding.ref;
      return t;
    case TagKind::Attribute: {
      auto [cls, attr] = split_ref(tag.binding.ref);
      t.cls = cls;
      t.attribute = attr;
      return t;
    }
    case TagKind::Edge: {
      auto defs = schema.find_edge_types(tag.binding.ref);
      if (defs.empty()) return std::nullopt;
      t.cls = defs.front()->to_class;
      return t;
    }
    default:
      return std::nullopt;
  }
}

QuestionType question_type(const EntityTag& tag) {
  if (tag.binding.ref == "count") return QuestionType::Count;
  if (tag.binding.ref == "list") return QuestionType::List;
  return QuestionType::Selection;
}

}  // namespace

Target extract_target(const DependencyTree& tree, const TaggedQuestion& q,
                      const OntologySchema& schema) {
  if (tree.size() != q.tokens.size())
    throw Error(ErrorCode::UnparseableInput, "dependency tree does not cover the question tokens");

  // Parent-child: a question word whose head is a tagged noun.
  for (std::size_t i = 0; i < q.tags.size(); ++i) {
    const EntityTag& qw = q.tags[i];
    if (qw.kind != TagKind::QuestionWord) continue;
    auto parent = tree.head(tag_node(tree, qw));
    if (!parent) continue;
    auto ti = q.tag_at(*parent);
    if (!ti) continue;
    if (auto t = target_from_tag(q.tags[*ti], *ti, schema)) {
      t->type = question_type(qw);
      return *t;
    }
  }

  // Brothers: the root is, or governs, a question word; a tagged noun
  // sibling under the same root is the target.
  const std::size_t root = tree.root();
  std::optional<QuestionType> type;
  if (auto ri = q.tag_at(root); ri && q.tags[*ri].kind == TagKind::QuestionWord) {
    type = question_type(q.tags[*ri]);
  }
  auto children = tree.children(root);
  if (!type) {
    for (std::size_t c : children) {
      auto ci = q.tag_at(c);
      if (ci && q.tags[*ci].kind == TagKind::QuestionWord && tag_node(tree, q.tags[*ci]) == c) {
        type = question_type(q.tags[*ci]);
        break;
      }
    }
  }
  if (type) {
    for (const char* label : {"obj", "nsubj"}) {
      for (std::size_t c : children) {
        if (tree.label(c) != label) continue;
        auto ci = q.tag_at(c);
        if (!ci) continue;
        if (auto t = target_from_tag(q.tags[*ci], *ci, schema)) {
          t->type = *type;
          return *t;
        }
      }
    }
  }
  throw Error(ErrorCode::NoTargetFound, "no question target found in '" + q.raw + "'");
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void dangling(const std::string& message) {
  throw Error(ErrorCode::DanglingQualifier, message);
}

struct Item {
  bool unit = false;      // literal qualifier awaiting attachment
  std::size_t tag = 0;    // entity or literal tag
  std::size_t position = 0;
  std::optional<std::string> op;
  std::optional<std::size_t> op_tag;
  Connector connector = Connector::And;
  bool removed = false;
  // Attribute items: the unit or value that closed them.
  std::optional<std::size_t> closed_by_unit;
  std::optional<Value> value;
  bool closed = false;
  bool attached = false;  // unit items
};

std::optional<Comparison> op_comparison(const std::string& op) {
  if (op == "gt" || op == "after") return Comparison::Gt;
  if (op == "lt" || op == "before") return Comparison::Lt;
  if (op == "ge" || op == "since") return Comparison::Ge;
  if (op == "le") return Comparison::Le;
  if (op == "neq") return Comparison::Neq;
  if (op == "contains") return Comparison::Contains;
  return std::nullopt;
}

bool unit_fits(const std::string& literal_kind, Datatype type) {
  switch (type) {
    case Datatype::Date:
      return literal_kind == "year" || literal_kind == "duration" || literal_kind == "date";
    case Datatype::Integer:
    case Datatype::Decimal:
      return literal_kind == "number" || literal_kind == "year";
    case Datatype::String:
      return literal_kind == "string";
    case Datatype::Boolean:
      return false;
  }
  return false;
}

/// Comparator and typed literal for a qualifier applied to an attribute.
std::pair<Comparison, Value> convert_unit(const std::optional<std::string>& op,
                                          const EntityTag& lit, const AttributeDef& def,
                                          const std::string& where) {
  const std::string& kind = lit.binding.ref;
  const Value& v = *lit.binding.literal;
  auto fail = [&]() -> std::pair<Comparison, Value> {
    dangling("qualifier '" + (op ? *op + " " : std::string()) + lit.surface +
             "' does not apply to " + where);
  };
  if (def.datatype == Datatype::Date) {
    if (kind == "year") {
      int y = static_cast<int>(std::get<std::int64_t>(v));
      if (!op || *op == "within") return {Comparison::InYear, v};
      auto cmp = op_comparison(*op);
      if (!cmp) return fail();
      switch (*cmp) {
        case Comparison::Lt: return {Comparison::Lt, Value{make_date(y, 1, 1)}};
        case Comparison::Ge: return {Comparison::Ge, Value{make_date(y, 1, 1)}};
        case Comparison::Gt: return {Comparison::Gt, Value{make_date(y, 12, 31)}};
        case Comparison::Le: return {Comparison::Le, Value{make_date(y, 12, 31)}};
        default: return fail();
      }
    }
    if (kind == "duration") {
      if (!op || *op == "within") return {Comparison::WithinDuration, v};
      return fail();
    }
    if (kind == "date") {
      if (!op) return {Comparison::Eq, v};
      auto cmp = op_comparison(*op);
      if (!cmp || *cmp == Comparison::Contains) return fail();
      return {*cmp, v};
    }
    return fail();
  }
  if (def.datatype == Datatype::Integer || def.datatype == Datatype::Decimal) {
    auto typed = coerce(v, def.datatype);
    if (!typed) return fail();
    if (!op) return {Comparison::Eq, *typed};
    auto cmp = op_comparison(*op);
    if (!cmp || *cmp == Comparison::Contains) return fail();
    return {*cmp, *typed};
  }
  if (def.datatype == Datatype::String && kind == "string") {
    if (!op) return {Comparison::Eq, v};
    auto cmp = op_comparison(*op);
    if (!cmp || (*cmp != Comparison::Contains && *cmp != Comparison::Neq)) return fail();
    return {*cmp, v};
  }
  return fail();
}

std::string anchor_class_of(const EntityTag& tag, const GraphStore& store) {
  switch (tag.kind) {
    case TagKind::Class: return tag.binding.ref;
    case TagKind::Instance: {
      const Vertex* v = store.find_vertex(tag.binding.ref);
      return v ? v->cls : std::string();
    }
    case TagKind::Attribute:
    case TagKind::Value: return split_ref(tag.binding.ref).first;
    default: return {};
  }
}

}  // namespace

std::vector<Constraint> extract_constraints(const DependencyTree& tree, const TaggedQuestion& q,
                                            const std::optional<Target>& target,
                                            const OntologySchema& schema,
                                            const GraphStore& store) {
  if (tree.size() != q.tokens.size())
    throw Error(ErrorCode::UnparseableInput, "dependency tree does not cover the question tokens");

  std::vector<Item> items;
  std::optional<std::string> pending_op;
  std::optional<std::size_t> pending_op_tag;
  bool pending_or = false;
  bool pending_not = false;

  auto take_connector = [&] {
    Connector c = pending_not ? Connector::Not : pending_or ? Connector::Or : Connector::And;
    pending_not = pending_or = false;
    return c;
  };

  for (std::size_t i = 0; i < q.tags.size(); ++i) {
    if (target && target->tag == i) continue;
    const EntityTag& t = q.tags[i];
    if (t.kind == TagKind::QuestionWord) continue;
    if (t.binding.kind == BindingKind::Operator) {
      const std::string& op = t.binding.ref;
      if (op == "and") continue;
      if (op == "or") pending_or = true;
      else if (op == "not") pending_not = true;
      else {
        if (pending_op) dangling("operator '" + q.tags[*pending_op_tag].surface + "' has no value");
        pending_op = op;
        pending_op_tag = i;
      }
      continue;
    }
    Item item;
    item.tag = i;
    item.position = t.begin;
    const bool value_bearing = t.binding.kind == BindingKind::Literal ||
                               t.binding.kind == BindingKind::Value ||
                               t.binding.kind == BindingKind::Instance;
    if (value_bearing && pending_op) {
      item.op = pending_op;
      item.op_tag = pending_op_tag;
      item.position = q.tags[*pending_op_tag].begin;
      pending_op.reset();
      pending_op_tag.reset();
    }
    item.unit = t.binding.kind == BindingKind::Literal;
    item.connector = take_connector();
    items.push_back(std::move(item));
  }
  if (pending_op) dangling("operator '" + q.tags[*pending_op_tag].surface + "' has no value");
  if (pending_not || pending_or) dangling("connector at the end of the question has no operand");

  auto tag_of = [&](const Item& it) -> const EntityTag& { return q.tags[it.tag]; };

  // A value of the same attribute closes an open attribute tag.
  for (auto& a : items) {
    if (a.unit || tag_of(a).kind != TagKind::Attribute) continue;
    for (auto& v : items) {
      if (v.removed || v.unit || tag_of(v).binding.kind != BindingKind::Value) continue;
      if (tag_of(v).binding.ref != tag_of(a).binding.ref) continue;
      a.value = tag_of(v).binding.literal;
      a.op = v.op;
      a.op_tag = v.op_tag;
      a.closed = true;
      if (a.connector == Connector::And) a.connector = v.connector;
      v.removed = true;
      break;
    }
  }

  // A class tag is subsumed by a value, attribute or instance of that class.
  for (auto& c : items) {
    if (c.unit || c.removed || tag_of(c).kind != TagKind::Class) continue;
    for (auto& other : items) {
      if (&other == &c || other.unit || other.removed) continue;
      auto k = tag_of(other).kind;
      if (k != TagKind::Value && k != TagKind::Attribute && k != TagKind::Instance) continue;
      if (anchor_class_of(tag_of(other), store) != tag_of(c).binding.ref) continue;
      c.removed = true;
      if (other.connector == Connector::And) other.connector = c.connector;
      break;
    }
  }

  auto closeness = [&](std::size_t tag_a, std::size_t tag_b) {
    const EntityTag& a = q.tags[tag_a];
    const EntityTag& b = q.tags[tag_b];
    std::size_t tree_d = tree.distance(tag_node(tree, a), tag_node(tree, b));
    std::size_t lin = a.begin > b.begin ? a.begin - b.begin : b.begin - a.begin;
    return std::make_tuple(tree_d, lin, tag_b);
  };

  // Open attribute tags take their nearest fitting qualifier.
  for (auto& a : items) {
    if (a.unit || a.removed || a.closed || tag_of(a).kind != TagKind::Attribute) continue;
    auto [cls, attr] = split_ref(tag_of(a).binding.ref);
    const AttributeDef* def = schema.find_attribute(cls, attr);
    std::optional<std::size_t> best;
    std::tuple<std::size_t, std::size_t, std::size_t> best_key{};
    for (std::size_t u = 0; u < items.size(); ++u) {
      const Item& unit = items[u];
      if (!unit.unit || unit.attached) continue;
      if (!unit_fits(tag_of(unit).binding.ref, def->datatype)) continue;
      auto key = closeness(a.tag, unit.tag);
      if (!best || key < best_key) {
        best = u;
        best_key = key;
      }
    }
    if (!best) dangling("attribute '" + tag_of(a).surface + "' has no value");
    items[*best].attached = true;
    a.closed_by_unit = *best;
    a.closed = true;
    if (a.connector == Connector::And) a.connector = items[*best].connector;
  }

  // Remaining qualifiers attach to the nearest entity with a fitting attribute.
  struct Derived {
    std::size_t unit;
    std::string cls;
    const AttributeDef* def;
  };
  std::vector<Derived> derived;
  for (std::size_t u = 0; u < items.size(); ++u) {
    Item& unit = items[u];
    if (!unit.unit || unit.attached) continue;
    const std::string& kind = tag_of(unit).binding.ref;
    std::optional<std::tuple<std::size_t, std::size_t, std::size_t>> best_key;
    std::string best_cls;
    const AttributeDef* best_def = nullptr;
    auto consider = [&](std::size_t tag_index) {
      const EntityTag& e = q.tags[tag_index];
      if (e.kind != TagKind::Class && e.kind != TagKind::Value && e.kind != TagKind::Instance &&
          e.kind != TagKind::Attribute)
        return;
      std::string cls = anchor_class_of(e, store);
      const ClassDef* cdef = schema.find_class(cls);
      if (!cdef) return;
      const AttributeDef* def = nullptr;
      for (const auto& a : cdef->attributes)
        if (unit_fits(kind, a.datatype) && a.datatype != Datatype::String &&
            (kind != "year" || a.datatype == Datatype::Date)) {
          def = &a;
          break;
        }
      if (!def) return;
      auto key = closeness(unit.tag, tag_index);
      if (!best_key || key < *best_key) {
        best_key = key;
        best_cls = cls;
        best_def = def;
      }
    };
    for (const auto& e : items)
      if (!e.unit && !e.removed && tag_of(e).kind != TagKind::Attribute) consider(e.tag);
    if (target) consider(target->tag);
    if (!best_def) dangling("qualifier '" + tag_of(unit).surface + "' has nothing to attach to");
    unit.attached = true;
    derived.push_back({u, best_cls, best_def});
  }

  std::vector<Constraint> out;
  auto surface_of = [&](const Item& it) {
    std::string s = it.op_tag ? q.tags[*it.op_tag].surface + " " : std::string();
    return s + tag_of(it).surface;
  };

  for (const auto& it : items) {
    if (it.removed || it.unit) continue;
    const EntityTag& t = tag_of(it);
    Constraint c;
    c.position = it.position;
    c.connector = it.connector;
    c.surface = surface_of(it);
    switch (t.kind) {
      case TagKind::Class:
        c.kind = ConstraintKind::Class;
        c.cls = t.binding.ref;
        c.value = Value{std::string()};
        break;
      case TagKind::Edge:
        c.kind = ConstraintKind::Edge;
        c.edge = t.binding.ref;
        c.value = Value{std::string()};
        break;
      case TagKind::Instance: {
        c.kind = ConstraintKind::Instance;
        c.vertex = t.binding.ref;
        c.cls = anchor_class_of(t, store);
        c.value = Value{t.binding.ref};
        if (it.op) {
          if (*it.op != "neq") dangling("operator '" + *it.op + "' does not apply to " + t.surface);
          c.cmp = Comparison::Neq;
        }
        break;
      }
      case TagKind::Value: {
        auto [cls, attr] = split_ref(t.binding.ref);
        c.kind = ConstraintKind::Attribute;
        c.cls = cls;
        c.attribute = attr;
        c.value = *t.binding.literal;
        if (it.op) {
          auto cmp = op_comparison(*it.op);
          if (!cmp || (*cmp == Comparison::Contains &&
                       !std::holds_alternative<std::string>(c.value)))
            dangling("operator '" + *it.op + "' does not apply to " + t.surface);
          c.cmp = *cmp;
        }
        break;
      }
      case TagKind::Attribute: {
        auto [cls, attr] = split_ref(t.binding.ref);
        c.kind = ConstraintKind::Attribute;
        c.cls = cls;
        c.attribute = attr;
        const AttributeDef* def = schema.find_attribute(cls, attr);
        if (it.closed_by_unit) {
          const Item& unit = items[*it.closed_by_unit];
          std::tie(c.cmp, c.value) = convert_unit(unit.op, tag_of(unit), *def, t.surface);
          c.surface += " " + surface_of(unit);
        } else {
          c.value = *it.value;
          if (it.op) {
            auto cmp = op_comparison(*it.op);
            if (!cmp) dangling("operator '" + *it.op + "' does not apply to " + t.surface);
            c.cmp = *cmp;
          }
        }
        break;
      }
      default:
        continue;
    }
    out.push_back(std::move(c));
  }
  for (const auto& d : derived) {
    const Item& unit = items[d.unit];
    Constraint c;
    c.kind = ConstraintKind::Attribute;
    c.cls = d.cls;
    c.attribute = d.def->name;
    c.position = unit.position;
    c.connector = unit.connector;
    c.surface = surface_of(unit);
    std::tie(c.cmp, c.value) =
        convert_unit(unit.op, tag_of(unit), *d.def, d.cls + "." + d.def->name);
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Constraint& a, const Constraint& b) { return a.position < b.position; });
  if (!out.empty() && out.front().connector == Connector::Or) out.front().connector = Connector::And;
  return out;
}

}  // namespace gridqa
