#include "oracle.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <deque>
#include <functional>
#include <set>

namespace gridqa::oracle {

namespace {

std::map<std::string, std::set<std::string>> undirected(const OntologySchema& schema) {
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& c : schema.classes()) adj[c.name];
  for (const auto& e : schema.edge_types()) {
    adj[e.from_class].insert(e.to_class);
    adj[e.to_class].insert(e.from_class);
  }
  return adj;
}

std::map<std::string, std::size_t> bfs(const OntologySchema& schema, const std::string& from) {
  auto adj = undirected(schema);
  std::map<std::string, std::size_t> dist;
  if (!adj.count(from)) return dist;
  std::deque<std::string> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    for (const auto& n : adj[cur])
      if (!dist.count(n)) {
        dist[n] = dist[cur] + 1;
        queue.push_back(n);
      }
  }
  return dist;
}

// Every simple path, counted per length. Parallel edge types count as
// distinct paths.
std::map<std::size_t, std::size_t> enumerate(const OntologySchema& schema, const std::string& from,
                                             const std::string& to) {
  std::map<std::size_t, std::size_t> by_length;
  std::set<std::string> visited{from};
  std::function<void(const std::string&, std::size_t)> walk = [&](const std::string& cur, std::size_t len) {
    if (cur == to) {
      ++by_length[len];
      return;
    }
    for (const auto& e : schema.edge_types()) {
      for (int side = 0; side < 2; ++side) {
        const std::string& a = side ? e.to_class : e.from_class;
        const std::string& b = side ? e.from_class : e.to_class;
        if (a != cur || visited.count(b)) continue;
        visited.insert(b);
        walk(b, len + 1);
        visited.erase(b);
      }
    }
  };
  walk(from, 0);
  return by_length;
}

std::string lower(const std::string& s) {
  std::string out = s;
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::optional<double> number(const Value& v) {
  if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (auto d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

// -1, 0, 1; nullopt when the two values are not comparable.
std::optional<int> order(const Value& a, const Value& b) {
  auto three = [](const auto& x, const auto& y) { return x < y ? -1 : (y < x ? 1 : 0); };
  auto na = number(a), nb = number(b);
  if (na && nb) return three(*na, *nb);
  if (a.index() != b.index()) return std::nullopt;
  if (auto s = std::get_if<std::string>(&a)) return three(*s, std::get<std::string>(b));
  if (auto d = std::get_if<Date>(&a)) return three(*d, std::get<Date>(b));
  if (auto f = std::get_if<bool>(&a)) return three(*f, std::get<bool>(b));
  return std::nullopt;
}

Date months_back(Date from, std::int64_t months) {
  std::chrono::year_month_day ymd{from};
  auto ym = std::chrono::year_month{ymd.year(), ymd.month()} - std::chrono::months{months};
  auto last = std::chrono::year_month_day_last{ym.year(), std::chrono::month_day_last{ym.month()}};
  auto day = std::min(ymd.day(), last.day());
  return std::chrono::sys_days{ym.year() / ym.month() / day};
}

Date window_start(Date ref, const Duration& d) {
  switch (d.unit) {
    case Duration::Unit::Day: return ref - std::chrono::days{d.amount};
    case Duration::Unit::Month: return months_back(ref, d.amount);
    case Duration::Unit::Year: return months_back(ref, d.amount * 12);
  }
  return ref;
}

void check_typed(const OntologySchema& schema, const Constraint& c) {
  if (c.kind != ConstraintKind::Attribute) return;
  const AttributeDef* def = schema.find_attribute(c.cls, c.attribute);
  if (!def) throw IllTyped("no attribute " + c.cls + "." + c.attribute);
  bool ok = false;
  switch (c.cmp) {
    case Comparison::Contains:
      ok = def->datatype == Datatype::String && std::holds_alternative<std::string>(c.value);
      break;
    case Comparison::WithinDuration:
      ok = def->datatype == Datatype::Date && std::holds_alternative<Duration>(c.value);
      break;
    case Comparison::InYear:
      ok = def->datatype == Datatype::Date && std::holds_alternative<std::int64_t>(c.value);
      break;
    default:
      switch (def->datatype) {
        case Datatype::String: ok = std::holds_alternative<std::string>(c.value); break;
        case Datatype::Date: ok = std::holds_alternative<Date>(c.value); break;
        case Datatype::Boolean: ok = std::holds_alternative<bool>(c.value); break;
        case Datatype::Decimal: ok = number(c.value).has_value(); break;
        case Datatype::Integer: {
          auto n = number(c.value);
          ok = n && *n == static_cast<double>(static_cast<std::int64_t>(*n));
          break;
        }
      }
  }
  if (!ok) throw IllTyped("literal does not fit " + c.cls + "." + c.attribute);
}

}  // namespace

std::optional<std::size_t> bfs_distance(const OntologySchema& schema, const std::string& from,
                                        const std::string& to) {
  auto dist = bfs(schema, from);
  auto it = dist.find(to);
  if (it == dist.end()) return std::nullopt;
  return it->second;
}

std::size_t diameter(const OntologySchema& schema) {
  std::size_t best = 0;
  for (const auto& c : schema.classes())
    for (const auto& [cls, d] : bfs(schema, c.name)) best = std::max(best, d);
  return best;
}

std::optional<std::size_t> enumerated_min_length(const OntologySchema& schema, const std::string& from,
                                                 const std::string& to) {
  auto all = enumerate(schema, from, to);
  if (all.empty()) return std::nullopt;
  return all.begin()->first;
}

std::size_t enumerated_min_count(const OntologySchema& schema, const std::string& from,
                                 const std::string& to) {
  auto all = enumerate(schema, from, to);
  return all.empty() ? 0 : all.begin()->second;
}

bool connected(const OntologySchema& schema) {
  if (schema.classes().empty()) return true;
  return bfs(schema, schema.classes().front().name).size() == schema.classes().size();
}

Date reference_date(const ParsedQuestion& parsed, Date evaluation_date) {
  for (const auto& c : parsed.constraints)
    if (c.kind == ConstraintKind::Attribute && c.cmp == Comparison::InYear)
      if (auto y = std::get_if<std::int64_t>(&c.value))
        return std::chrono::sys_days{std::chrono::year{static_cast<int>(*y)} / 12 / 31};
  return evaluation_date;
}

bool holds(const OntologySchema& schema, const Constraint& c, const Vertex& v, Date reference) {
  switch (c.kind) {
    case ConstraintKind::Class:
    case ConstraintKind::Edge:
      return true;
    case ConstraintKind::Instance:
      return c.cmp == Comparison::Neq ? v.id != c.vertex : v.id == c.vertex;
    case ConstraintKind::Attribute:
      break;
  }
  check_typed(schema, c);
  auto it = v.attrs.find(c.attribute);
  if (it == v.attrs.end()) return false;
  const Value& have = it->second;
  switch (c.cmp) {
    case Comparison::Contains: {
      const auto* s = std::get_if<std::string>(&have);
      return s && lower(*s).find(lower(std::get<std::string>(c.value))) != std::string::npos;
    }
    case Comparison::InYear: {
      const auto* d = std::get_if<Date>(&have);
      return d && static_cast<int>(std::chrono::year_month_day{*d}.year()) == std::get<std::int64_t>(c.value);
    }
    case Comparison::WithinDuration: {
      const auto* d = std::get_if<Date>(&have);
      return d && *d >= window_start(reference, std::get<Duration>(c.value)) && *d <= reference;
    }
    default:
      break;
  }
  auto o = order(have, c.value);
  if (!o) return false;
  switch (c.cmp) {
    case Comparison::Eq: return *o == 0;
    case Comparison::Neq: return *o != 0;
    case Comparison::Lt: return *o < 0;
    case Comparison::Le: return *o <= 0;
    case Comparison::Gt: return *o > 0;
    case Comparison::Ge: return *o >= 0;
    default: return false;
  }
}

struct Evaluator::Query {
  const ReasoningPlan* plan = nullptr;
  const ParsedQuestion* parsed = nullptr;
  Date reference{};
  std::vector<bool> active;
  std::vector<std::vector<std::size_t>> at;  // node -> constraints checked there
  std::vector<std::vector<std::size_t>> children;
};

Evaluator::Evaluator(const GraphStore& store) : store_(store) {
  for (const auto& v : store.vertices()) by_id_[v.id] = &v;
  const auto edges = store.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    incident_[edges[i].src].push_back(i);
    if (edges[i].dst != edges[i].src) incident_[edges[i].dst].push_back(i);
  }
}

const std::vector<std::size_t>& Evaluator::incident(const std::string& id) const {
  auto it = incident_.find(id);
  return it == incident_.end() ? none_ : it->second;
}

std::vector<std::string> Evaluator::scan(const std::string& cls) const {
  std::vector<std::string> out;
  for (const auto& v : store_.vertices())
    if (v.cls == cls) out.push_back(v.id);
  std::sort(out.begin(), out.end());
  return out;
}

bool Evaluator::sat(const Query& q, std::size_t node, const Vertex& v) const {
  const PlanNode& pn = q.plan->nodes[node];
  if (v.cls != pn.cls) return false;
  for (std::size_t ci : q.at[node])
    if (!holds(store_.schema(), q.parsed->constraints[ci], v, q.reference)) return false;
  for (std::size_t child : q.children[node]) {
    if (!q.active[child]) continue;
    const PlanNode& cn = q.plan->nodes[child];
    bool found = false;
    for (std::size_t ei : incident(v.id)) {
      const Edge& e = store_.edge(static_cast<std::uint32_t>(ei));
      if (e.type != cn.edge) continue;
      // Forward: the stored edge runs child -> parent.
      const std::string* other = nullptr;
      if (cn.direction == Direction::Forward && e.dst == v.id) other = &e.src;
      if (cn.direction == Direction::Backward && e.src == v.id) other = &e.dst;
      if (!other) continue;
      if (sat(q, child, *by_id_.at(*other))) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<std::string> Evaluator::answers(const ReasoningPlan& plan, const ParsedQuestion& parsed,
                                            Date evaluation_date) const {
  const auto& cs = parsed.constraints;
  for (const auto& c : cs) check_typed(store_.schema(), c);

  Query base;
  base.plan = &plan;
  base.parsed = &parsed;
  base.reference = reference_date(parsed, evaluation_date);
  base.children.resize(plan.nodes.size());
  for (std::size_t k = 0; k < plan.nodes.size(); ++k)
    if (plan.nodes[k].parent) base.children[*plan.nodes[k].parent].push_back(k);

  auto chain_query = [&](const std::vector<std::size_t>& constraints) {
    Query q = base;
    q.active.assign(plan.nodes.size(), false);
    q.at.assign(plan.nodes.size(), {});
    q.active[0] = true;
    for (std::size_t ci : constraints) {
      std::size_t node = plan.bindings[ci];
      q.at[node].push_back(ci);
      for (std::optional<std::size_t> k = node; k; k = plan.nodes[*k].parent) q.active[*k] = true;
    }
    return q;
  };

  struct Group {
    Query positive;
    std::vector<Query> negated;
  };
  std::vector<std::vector<std::size_t>> split;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (split.empty() || cs[i].connector == Connector::Or) split.emplace_back();
    split.back().push_back(i);
  }
  if (split.empty()) split.emplace_back();
  std::vector<Group> groups;
  for (const auto& members : split) {
    std::vector<std::size_t> pos;
    Group g;
    for (std::size_t i : members) {
      if (cs[i].connector == Connector::Not) g.negated.push_back(chain_query({i}));
      else pos.push_back(i);
    }
    g.positive = chain_query(pos);
    groups.push_back(std::move(g));
  }

  std::vector<std::string> out;
  for (const std::string& id : scan(plan.target)) {
    const Vertex& r = *by_id_.at(id);
    for (const Group& g : groups) {
      if (!sat(g.positive, 0, r)) continue;
      bool excluded = std::any_of(g.negated.begin(), g.negated.end(),
                                  [&](const Query& q) { return sat(q, 0, r); });
      if (!excluded) {
        out.push_back(id);
        break;
      }
    }
  }
  return out;
}

}  // namespace gridqa::oracle
