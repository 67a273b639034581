#include "random_cases.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace gridqa::oracle {

namespace {

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string class_name(std::size_t i) {
  std::string s = "K";
  if (i < 10) s += '0';
  return s + std::to_string(i);
}

Date random_date(Rng& rng) {
  int y = static_cast<int>(2000 + pick(rng, 25));
  unsigned m = static_cast<unsigned>(1 + pick(rng, 12));
  unsigned d = static_cast<unsigned>(1 + pick(rng, 28));
  return make_date(y, m, d);
}

}  // namespace

OntologySchema random_schema(Rng& rng, std::size_t classes, std::size_t extra_edges) {
  std::vector<ClassDef> cls;
  for (std::size_t i = 0; i < classes; ++i) {
    ClassDef c;
    c.name = class_name(i);
    c.kind = coin(rng, 0.3) ? ClassKind::Abstract : ClassKind::Physical;
    c.attributes = {{"name", Datatype::String, {}}, {"level", Datatype::Integer, {}}, {"since", Datatype::Date, {}}};
    if (coin(rng, 0.5)) c.attributes.push_back({"rating", Datatype::Decimal, {}});
    if (coin(rng, 0.3)) c.attributes.push_back({"active", Datatype::Boolean, {}});
    cls.push_back(std::move(c));
  }
  std::vector<EdgeTypeDef> edges;
  auto add = [&](std::size_t a, std::size_t b) {
    EdgeTypeDef e;
    e.name = "r" + std::to_string(edges.size());
    e.from_class = cls[a].name;
    e.to_class = cls[b].name;
    e.aggregated = coin(rng, 0.1);
    edges.push_back(std::move(e));
  };
  for (std::size_t i = 1; i < classes; ++i) {
    std::size_t j = pick(rng, i);
    coin(rng, 0.5) ? add(i, j) : add(j, i);
  }
  if (classes > 1)
    for (std::size_t k = 0; k < extra_edges; ++k) {
      std::size_t a = pick(rng, classes), b = pick(rng, classes);
      if (a != b) add(a, b);
    }
  return OntologySchema::build("random", std::move(cls), std::move(edges));
}

GraphStore random_store(std::shared_ptr<const OntologySchema> schema, Rng& rng, std::size_t vertices,
                        std::size_t edges_per_type) {
  const auto& classes = schema->classes();
  std::vector<Vertex> vs;
  std::vector<std::vector<std::string>> members(classes.size());
  static const char* words[] = {"alpha", "bravo", "delta", "echo", "kilo", "lima", "oscar", "sierra"};
  for (std::size_t i = 0; i < vertices; ++i) {
    std::size_t c = i < classes.size() ? i : pick(rng, classes.size());
    Vertex v;
    v.id = "v" + std::to_string(100000 + i);
    v.cls = classes[c].name;
    for (const auto& a : classes[c].attributes) {
      if (coin(rng, 0.1)) continue;  // sparse attributes exercise missing values
      switch (a.datatype) {
        case Datatype::String: v.attrs[a.name] = std::string(words[pick(rng, 8)]) + "-" + std::to_string(pick(rng, 20)); break;
        case Datatype::Integer: v.attrs[a.name] = static_cast<std::int64_t>(pick(rng, 10)); break;
        case Datatype::Decimal: v.attrs[a.name] = static_cast<double>(pick(rng, 40)) / 4.0; break;
        case Datatype::Date: v.attrs[a.name] = random_date(rng); break;
        case Datatype::Boolean: v.attrs[a.name] = coin(rng, 0.5); break;
      }
    }
    members[c].push_back(v.id);
    vs.push_back(std::move(v));
  }
  auto index = [&](const std::string& name) {
    for (std::size_t c = 0; c < classes.size(); ++c)
      if (classes[c].name == name) return c;
    return std::size_t{0};
  };
  std::vector<Edge> es;
  for (const auto& et : schema->edge_types()) {
    const auto& from = members[index(et.from_class)];
    const auto& to = members[index(et.to_class)];
    if (from.empty() || to.empty()) continue;
    for (std::size_t k = 0; k < edges_per_type; ++k)
      es.push_back({from[pick(rng, from.size())], to[pick(rng, to.size())], et.name, {}});
  }
  return GraphStore::build(std::move(schema), std::move(vs), std::move(es));
}

ParsedQuestion random_question(Rng& rng, const GraphStore& store, QuestionShape shape) {
  const OntologySchema& schema = store.schema();
  const auto& classes = schema.classes();
  ParsedQuestion q;
  Target t;
  t.cls = classes[pick(rng, classes.size())].name;
  t.type = coin(rng, 0.15) ? QuestionType::Count : QuestionType::Selection;
  q.target = t;
  q.raw = "random question on " + t.cls;

  std::size_t n = pick(rng, shape.max_constraints + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Constraint c;
    c.position = i;
    double roll = std::uniform_real_distribution<double>(0, 1)(rng);
    if (roll < 0.2 && shape.allow_edges && !schema.edge_types().empty()) {
      c.kind = ConstraintKind::Edge;
      c.edge = schema.edge_types()[pick(rng, schema.edge_types().size())].name;
    } else if (roll < 0.35) {
      c.kind = ConstraintKind::Class;
      c.cls = classes[pick(rng, classes.size())].name;
    } else if (roll < 0.5 && store.vertex_count() > 0) {
      const Vertex& v = store.vertex(static_cast<VertexIndex>(pick(rng, store.vertex_count())));
      c.kind = ConstraintKind::Instance;
      c.cls = v.cls;
      c.vertex = v.id;
      c.cmp = coin(rng, 0.2) ? Comparison::Neq : Comparison::Eq;
    } else {
      c.kind = ConstraintKind::Attribute;
      const ClassDef& cd = classes[pick(rng, classes.size())];
      const AttributeDef& ad = cd.attributes[pick(rng, cd.attributes.size())];
      c.cls = cd.name;
      c.attribute = ad.name;
      // Sample a literal from a vertex that has the attribute, if any.
      std::optional<Value> sample;
      auto members = store.class_members(cd.name);
      for (int tries = 0; tries < 8 && !members.empty() && !sample; ++tries)
        if (const Value* v = store.vertex(members[pick(rng, members.size())]).attr(ad.name)) sample = *v;
      switch (ad.datatype) {
        case Datatype::String: {
          std::string s = sample ? std::get<std::string>(*sample) : "missing";
          if (coin(rng, 0.3)) {
            c.cmp = Comparison::Contains;
            c.value = s.substr(0, std::min<std::size_t>(s.size(), 1 + pick(rng, 4)));
          } else {
            c.cmp = coin(rng, 0.2) ? Comparison::Neq : Comparison::Eq;
            c.value = s;
          }
          break;
        }
        case Datatype::Integer:
        case Datatype::Decimal: {
          static const Comparison ops[] = {Comparison::Eq, Comparison::Neq, Comparison::Lt,
                                           Comparison::Le, Comparison::Gt, Comparison::Ge};
          c.cmp = ops[pick(rng, 6)];
          c.value = sample ? *sample : Value{std::int64_t{3}};
          if (ad.datatype == Datatype::Decimal && coin(rng, 0.3)) c.value = static_cast<std::int64_t>(pick(rng, 10));
          break;
        }
        case Datatype::Date: {
          Date d = sample ? std::get<Date>(*sample) : make_date(2015, 6, 1);
          switch (pick(rng, 4)) {
            case 0: c.cmp = Comparison::InYear; c.value = static_cast<std::int64_t>(year_of(d)); break;
            case 1: {
              c.cmp = Comparison::WithinDuration;
              static const Duration::Unit units[] = {Duration::Unit::Day, Duration::Unit::Month, Duration::Unit::Year};
              Duration span{static_cast<std::int64_t>(1 + pick(rng, 10)), units[pick(rng, 3)]};
              if (span.unit == Duration::Unit::Day) span.amount *= 200;
              if (span.unit == Duration::Unit::Month) span.amount *= 12;
              c.value = span;
              break;
            }
            case 2: c.cmp = coin(rng, 0.5) ? Comparison::Lt : Comparison::Ge; c.value = d; break;
            default: c.cmp = Comparison::Eq; c.value = d; break;
          }
          break;
        }
        case Datatype::Boolean:
          c.cmp = coin(rng, 0.3) ? Comparison::Neq : Comparison::Eq;
          c.value = sample ? *sample : Value{true};
          break;
      }
    }
    if (i > 0) {
      double r = std::uniform_real_distribution<double>(0, 1)(rng);
      if (shape.allow_or && r < 0.2) c.connector = Connector::Or;
      else if (shape.allow_not && r < 0.4) c.connector = Connector::Not;
    }
    c.surface = c.describe();
    q.constraints.push_back(std::move(c));
  }
  return q;
}

}  // namespace gridqa::oracle
