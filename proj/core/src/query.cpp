#include "gridqa/query.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "gridqa/error.hpp"

namespace gridqa {

using nlohmann::json;

namespace {

std::string var(std::size_t node) { return "n" + std::to_string(node); }

std::string_view arrow_left(EdgeDirection d) { return d == EdgeDirection::In ? "<-" : "-"; }
std::string_view arrow_right(EdgeDirection d) { return d == EdgeDirection::Out ? "->" : "-"; }

}  // namespace

std::string NodePredicate::describe(const std::string& v) const {
  if (kind == Kind::Instance) return "id(" + v + ") " + (negate_instance ? "!= " : "== ") + "'" + vertex + "'";
  return v + "." + attribute + " " + predicate.describe();
}

Date reference_date(const ParsedQuestion& parsed, Date evaluation_date) {
  for (const auto& c : parsed.constraints)
    if (c.kind == ConstraintKind::Attribute && c.cmp == Comparison::InYear)
      if (auto y = std::get_if<std::int64_t>(&c.value)) return make_date(static_cast<int>(*y), 12, 31);
  return evaluation_date;
}

Predicate resolve_predicate(const Constraint& c, Date reference) {
  Predicate p;
  p.value = c.value;
  switch (c.cmp) {
    case Comparison::Eq: p.op = Comparator::Eq; break;
    case Comparison::Neq: p.op = Comparator::Neq; break;
    case Comparison::Lt: p.op = Comparator::Lt; break;
    case Comparison::Le: p.op = Comparator::Le; break;
    case Comparison::Gt: p.op = Comparator::Gt; break;
    case Comparison::Ge: p.op = Comparator::Ge; break;
    case Comparison::Contains: p.op = Comparator::Contains; break;
    case Comparison::WithinDuration: {
      const auto* d = std::get_if<Duration>(&c.value);
      if (!d) throw Error(ErrorCode::TypeMismatch, "within needs a duration: " + c.describe());
      p.op = Comparator::Between;
      p.value = subtract(reference, *d);
      p.upper = Value{reference};
      break;
    }
    case Comparison::InYear: {
      const auto* y = std::get_if<std::int64_t>(&c.value);
      if (!y) throw Error(ErrorCode::TypeMismatch, "in-year needs a year: " + c.describe());
      p.op = Comparator::Between;
      p.value = make_date(static_cast<int>(*y), 1, 1);
      p.upper = Value{make_date(static_cast<int>(*y), 12, 31)};
      break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// compile

TraversalPlan compile(const ReasoningPlan& plan, const ParsedQuestion& parsed,
                      const GraphStore& store, Date evaluation_date) {
  const std::size_t n = parsed.constraints.size();
  if (!parsed.target || parsed.target->cls != plan.target)
    throw Error(ErrorCode::InconsistentPlan, "plan and question name different targets");
  if (plan.bindings.size() != n || plan.paths.size() != n)
    throw Error(ErrorCode::InconsistentPlan, "plan and question disagree on the constraint count");
  if (plan.nodes.empty() || plan.nodes[0].cls != plan.target)
    throw Error(ErrorCode::InconsistentPlan, "plan tree is not rooted at the target");
  for (std::size_t b : plan.bindings)
    if (b >= plan.nodes.size()) throw Error(ErrorCode::InconsistentPlan, "binding outside the plan tree");

  TraversalPlan out;
  out.target = plan.target;
  out.target_attribute = parsed.target->attribute;
  out.type = parsed.target->type;
  out.constraint_count = n;
  out.reference_date = reference_date(parsed, evaluation_date);
  out.bindings = plan.bindings;
  for (const auto& node : plan.nodes) {
    out.node_parents.push_back(node.parent);
    out.node_classes.push_back(node.cls);
  }

  std::vector<std::optional<NodePredicate>> preds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Constraint& c = parsed.constraints[i];
    if (plan.nodes[plan.bindings[i]].cls != c.cls && c.kind != ConstraintKind::Edge)
      throw Error(ErrorCode::InconsistentPlan, "constraint " + std::to_string(i) + " is bound to the wrong class");
    if (c.kind == ConstraintKind::Attribute) {
      NodePredicate np;
      np.constraint = i;
      np.kind = NodePredicate::Kind::Attribute;
      np.attribute = c.attribute;
      np.predicate = store.typed_predicate(c.cls, c.attribute, resolve_predicate(c, out.reference_date));
      preds[i] = std::move(np);
    } else if (c.kind == ConstraintKind::Instance) {
      NodePredicate np;
      np.constraint = i;
      np.kind = NodePredicate::Kind::Instance;
      np.vertex = c.vertex;
      np.negate_instance = c.cmp == Comparison::Neq;
      preds[i] = std::move(np);
    }
  }

  // Disjuncts split at "or"; "not" binds tighter than "and".
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (groups.empty() || parsed.constraints[i].connector == Connector::Or) groups.emplace_back();
    groups.back().push_back(i);
  }
  if (groups.empty()) groups.emplace_back();

  auto edge_aggregated = [&](std::size_t node) {
    const PlanNode& pn = plan.nodes[node];
    if (!pn.parent) return false;
    const PlanNode& parent = plan.nodes[*pn.parent];
    const EdgeTypeDef* def = pn.direction == Direction::Forward
                                 ? store.schema().find_edge_type(pn.edge, pn.cls, parent.cls)
                                 : store.schema().find_edge_type(pn.edge, parent.cls, pn.cls);
    return def && def->aggregated;
  };
  auto candidate_count = [&](std::size_t i) -> std::size_t {
    const Constraint& c = parsed.constraints[i];
    const std::string& cls = plan.nodes[plan.bindings[i]].cls;
    std::size_t members = store.class_members(cls).size();
    switch (c.kind) {
      case ConstraintKind::Attribute:
        return store.match_attribute(c.cls, c.attribute, preds[i]->predicate).size();
      case ConstraintKind::Instance:
        if (c.cmp == Comparison::Neq) return members > 0 ? members - 1 : 0;
        return store.find_vertex(c.vertex) ? 1 : 0;
      default:
        return members;
    }
  };

  for (const auto& members : groups) {
    GroupPlan g;
    for (std::size_t i : members)
      (parsed.constraints[i].connector == Connector::Not ? g.negated : g.positive).push_back(i);

    std::set<std::size_t> in_group{0};
    std::map<std::size_t, std::vector<NodePredicate>> at;
    for (std::size_t i : g.positive) {
      for (std::optional<std::size_t> k = plan.bindings[i]; k; k = plan.nodes[*k].parent) in_group.insert(*k);
      if (preds[i]) at[plan.bindings[i]].push_back(*preds[i]);
    }

    if (!g.positive.empty()) {
      std::tuple<std::size_t, bool, std::size_t> best{};
      for (std::size_t i : g.positive) {
        std::tuple<std::size_t, bool, std::size_t> key{candidate_count(i),
                                                       edge_aggregated(plan.bindings[i]), i};
        if (!g.seed_constraint || key < best) {
          best = key;
          g.seed_constraint = i;
        }
      }
      g.seed_node = plan.bindings[*g.seed_constraint];
    }
    g.seed_class = plan.nodes[g.seed_node].cls;
    g.seed_predicates = at[g.seed_node];

    std::vector<bool> on_spine(plan.nodes.size(), false);
    std::vector<std::size_t> spine;
    for (std::optional<std::size_t> k = g.seed_node; k; k = plan.nodes[*k].parent) {
      spine.push_back(*k);
      on_spine[*k] = true;
    }

    auto branch = [&](auto&& self, std::size_t node) -> FilterBranch {
      const PlanNode& pn = plan.nodes[node];
      FilterBranch b;
      b.node = node;
      b.edge = pn.edge;
      // Parent -> child runs opposite to the stored child -> parent hop.
      b.direction = pn.direction == Direction::Forward ? EdgeDirection::In : EdgeDirection::Out;
      b.cls = pn.cls;
      b.predicates = at[node];
      for (std::size_t c : plan.children(node))
        if (in_group.count(c) && !on_spine[c]) b.children.push_back(self(self, c));
      return b;
    };
    auto filters_at = [&](std::size_t node) {
      std::vector<FilterBranch> out_filters;
      for (std::size_t c : plan.children(node))
        if (in_group.count(c) && !on_spine[c]) out_filters.push_back(branch(branch, c));
      return out_filters;
    };

    g.seed_filters = filters_at(g.seed_node);
    for (std::size_t s = 0; s + 1 < spine.size(); ++s) {
      const PlanNode& pn = plan.nodes[spine[s]];
      Hop h;
      h.from_node = spine[s];
      h.node = spine[s + 1];
      h.edge = pn.edge;
      h.direction = pn.direction == Direction::Forward ? EdgeDirection::Out : EdgeDirection::In;
      h.reversed = pn.direction == Direction::Backward;
      h.cls = plan.nodes[h.node].cls;
      h.predicates = at[h.node];
      h.filters = filters_at(h.node);
      g.hops.push_back(std::move(h));
    }

    for (std::size_t q : g.negated) {
      AntiJoin aj;
      aj.constraint = q;
      std::vector<std::size_t> chain;
      for (std::optional<std::size_t> k = plan.bindings[q]; k && *k != 0; k = plan.nodes[*k].parent)
        chain.push_back(*k);
      std::vector<NodePredicate> own;
      if (preds[q]) own.push_back(*preds[q]);
      if (chain.empty()) {
        aj.root_predicates = own;
      } else {
        std::optional<FilterBranch> inner;
        for (std::size_t k : chain) {  // anchor end first
          const PlanNode& pn = plan.nodes[k];
          FilterBranch b;
          b.node = k;
          b.edge = pn.edge;
          b.direction = pn.direction == Direction::Forward ? EdgeDirection::In : EdgeDirection::Out;
          b.cls = pn.cls;
          if (!inner) b.predicates = own;
          else b.children.push_back(std::move(*inner));
          inner = std::move(b);
        }
        aj.branch = std::move(inner);
      }
      g.anti_joins.push_back(std::move(aj));
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// pseudo-query

namespace {

void describe_branch(std::ostringstream& os, const FilterBranch& b, std::size_t parent,
                     const std::string& indent, const char* keyword) {
  os << indent << keyword << " (" << var(parent) << ")" << arrow_left(b.direction) << "[:" << b.edge
     << "]" << arrow_right(b.direction) << "(" << var(b.node) << ":" << b.cls << ")";
  for (std::size_t i = 0; i < b.predicates.size(); ++i)
    os << (i == 0 ? " WHERE " : " AND ") << b.predicates[i].describe(var(b.node));
  os << '\n';
  for (const auto& c : b.children) describe_branch(os, c, b.node, indent + "  ", "EXISTS");
}

}  // namespace

std::string TraversalPlan::pseudo_query() const {
  std::ostringstream os;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const GroupPlan& g = groups[gi];
    if (gi > 0) os << "UNION\n";
    os << "MATCH (" << var(g.seed_node) << ":" << g.seed_class << ")";
    for (std::size_t i = 0; i < g.seed_predicates.size(); ++i)
      os << (i == 0 ? " WHERE " : " AND ") << g.seed_predicates[i].describe(var(g.seed_node));
    os << '\n';
    for (const auto& f : g.seed_filters) describe_branch(os, f, g.seed_node, "  ", "FILTER EXISTS");
    for (const auto& h : g.hops) {
      os << "HOP (" << var(h.from_node) << ")" << arrow_left(h.direction) << "[:" << h.edge << "]"
         << arrow_right(h.direction) << "(" << var(h.node) << ":" << h.cls << ")";
      for (std::size_t i = 0; i < h.predicates.size(); ++i)
        os << (i == 0 ? " WHERE " : " AND ") << h.predicates[i].describe(var(h.node));
      os << '\n';
      for (const auto& f : h.filters) describe_branch(os, f, h.node, "  ", "FILTER EXISTS");
    }
    for (const auto& aj : g.anti_joins) {
      if (aj.branch) {
        describe_branch(os, *aj.branch, 0, "", "EXCEPT");
      } else {
        os << "EXCEPT (" << var(0) << ")";
        for (std::size_t i = 0; i < aj.root_predicates.size(); ++i)
          os << (i == 0 ? " WHERE " : " AND ") << aj.root_predicates[i].describe(var(0));
        os << '\n';
      }
    }
  }
  os << "RETURN ";
  if (type == QuestionType::Count) os << "count(" << var(0) << ")";
  else if (target_attribute) os << var(0) << ", " << var(0) << "." << *target_attribute;
  else os << var(0);
  return os.str();
}

namespace {

json predicate_json(const NodePredicate& p) {
  json j{{"constraint", p.constraint}};
  if (p.kind == NodePredicate::Kind::Instance) {
    j["instance"] = p.vertex;
    j["negated"] = p.negate_instance;
  } else {
    j["attribute"] = p.attribute;
    j["op"] = to_string(p.predicate.op);
    j["value"] = value_to_json(p.predicate.value);
    if (p.predicate.upper) j["upper"] = value_to_json(*p.predicate.upper);
  }
  return j;
}

json predicates_json(const std::vector<NodePredicate>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(predicate_json(p));
  return a;
}

json branch_json(const FilterBranch& b) {
  json children = json::array();
  for (const auto& c : b.children) children.push_back(branch_json(c));
  return {{"node", b.node},          {"edge", b.edge},
          {"direction", to_string(b.direction)}, {"class", b.cls},
          {"predicates", predicates_json(b.predicates)}, {"children", children}};
}

}  // namespace

json TraversalPlan::to_json() const {
  json j{{"target", target},
         {"type", to_string(type)},
         {"reference_date", format_date(reference_date)},
         {"groups", json::array()}};
  if (target_attribute) j["target_attribute"] = *target_attribute;
  for (const auto& g : groups) {
    json gj{{"positive", g.positive}, {"negated", g.negated}};
    gj["seed"] = {{"node", g.seed_node},
                  {"class", g.seed_class},
                  {"constraint", g.seed_constraint ? json(*g.seed_constraint) : json(nullptr)},
                  {"predicates", predicates_json(g.seed_predicates)}};
    gj["seed_filters"] = json::array();
    for (const auto& f : g.seed_filters) gj["seed_filters"].push_back(branch_json(f));
    gj["hops"] = json::array();
    for (const auto& h : g.hops) {
      json filters = json::array();
      for (const auto& f : h.filters) filters.push_back(branch_json(f));
      gj["hops"].push_back({{"from", h.from_node},
                            {"node", h.node},
                            {"edge", h.edge},
                            {"direction", to_string(h.direction)},
                            {"reversed", h.reversed},
                            {"class", h.cls},
                            {"predicates", predicates_json(h.predicates)},
                            {"filters", filters}});
    }
    gj["anti_joins"] = json::array();
    for (const auto& aj : g.anti_joins)
      gj["anti_joins"].push_back({{"constraint", aj.constraint},
                                  {"root_predicates", predicates_json(aj.root_predicates)},
                                  {"branch", aj.branch ? branch_json(*aj.branch) : json(nullptr)}});
    j["groups"].push_back(std::move(gj));
  }
  return j;
}

// ---------------------------------------------------------------------------
// execute

namespace {

class Executor {
 public:
  Executor(const GraphStore& store, const TraversalPlan& plan)
      : store_(store), plan_(plan), touched_(store.vertex_count(), 0), stamp_(store.vertex_count(), 0) {}

  AnswerGraph run();

 private:
  struct Layer {
    std::vector<VertexIndex> vertices;
    std::vector<std::size_t> pred;
    std::vector<std::uint32_t> via;
  };
  static constexpr VertexIndex kUnset = std::numeric_limits<VertexIndex>::max();
  using Assignment = std::vector<VertexIndex>;  // plan node -> vertex

  void touch(VertexIndex v) {
    if (!touched_[v]) {
      touched_[v] = 1;
      ++touched_count_;
    }
  }

  bool holds(const NodePredicate& p, VertexIndex v) const {
    const Vertex& vx = store_.vertex(v);
    if (p.kind == NodePredicate::Kind::Instance) return (vx.id == p.vertex) != p.negate_instance;
    const Value* val = vx.attr(p.attribute);
    return val && p.predicate.matches(*val);
  }
  bool all_hold(const std::vector<NodePredicate>& ps, VertexIndex v) const {
    return std::all_of(ps.begin(), ps.end(), [&](const NodePredicate& p) { return holds(p, v); });
  }

  template <typename F>
  void for_each_adjacent(VertexIndex v, const std::string& edge, EdgeDirection dir,
                         const std::string& cls, F&& f) {
    auto type = store_.edge_type_id(edge);
    if (!type) return;
    auto list = dir == EdgeDirection::Out ? store_.out_edges(v) : store_.in_edges(v);
    auto lo = std::lower_bound(list.begin(), list.end(), *type,
                               [](const AdjacentEdge& a, EdgeTypeId t) { return a.type < t; });
    for (auto it = lo; it != list.end() && it->type == *type; ++it) {
      if (store_.vertex(it->neighbor).cls != cls) continue;
      touch(it->neighbor);
      if (f(*it)) return;
    }
  }

  bool exists(const FilterBranch& b, VertexIndex v) {
    auto key = std::make_pair(&b, v);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool found = false;
    for_each_adjacent(v, b.edge, b.direction, b.cls, [&](const AdjacentEdge& a) {
      if (!all_hold(b.predicates, a.neighbor)) return false;
      for (const auto& c : b.children)
        if (!exists(c, a.neighbor)) return false;
      found = true;
      return true;
    });
    memo_.emplace(key, found);
    return found;
  }

  bool filters_pass(const std::vector<FilterBranch>& fs, VertexIndex v) {
    for (const auto& f : fs)
      if (!exists(f, v)) return false;
    return true;
  }

  void witness(const FilterBranch& b, VertexIndex v, Assignment& assign,
               std::vector<std::uint32_t>& edges) {
    for_each_adjacent(v, b.edge, b.direction, b.cls, [&](const AdjacentEdge& a) {
      if (!all_hold(b.predicates, a.neighbor)) return false;
      for (const auto& c : b.children)
        if (!exists(c, a.neighbor)) return false;
      assign[b.node] = a.neighbor;
      edges.push_back(a.edge);
      for (const auto& c : b.children) witness(c, a.neighbor, assign, edges);
      return true;
    });
  }

  struct PairHash {
    std::size_t operator()(const std::pair<const FilterBranch*, VertexIndex>& k) const {
      return std::hash<const void*>()(k.first) * 31 + k.second;
    }
  };

  const GraphStore& store_;
  const TraversalPlan& plan_;
  std::vector<char> touched_;
  std::size_t touched_count_ = 0;
  std::vector<std::uint32_t> stamp_;  // per-hop dedup marks
  std::uint32_t current_stamp_ = 0;
  std::size_t hops_ = 0;
  std::unordered_map<std::pair<const FilterBranch*, VertexIndex>, bool, PairHash> memo_;
};

/// Sorts and dedups ids drawn from [0, universe); dense inputs use a bitmap
/// pass instead of a comparison sort.
template <typename T>
void sort_unique(std::vector<T>& ids, std::size_t universe) {
  if (ids.size() * 8 < universe) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return;
  }
  std::vector<char> mark(universe, 0);
  for (T v : ids) mark[v] = 1;
  ids.clear();
  for (std::size_t v = 0; v < universe; ++v)
    if (mark[v]) ids.push_back(static_cast<T>(v));
}

std::size_t branch_hops(const FilterBranch& b) {
  std::size_t n = 1;
  for (const auto& c : b.children) n += branch_hops(c);
  return n;
}

AnswerGraph Executor::run() {
  AnswerGraph out;
  out.target = plan_.target;
  out.type = plan_.type;
  out.target_attribute = plan_.target_attribute;

  struct Accepted {
    std::size_t group;
    std::size_t layer_index;
  };
  // First accepting group wins; answers are sorted afterwards.
  std::vector<VertexIndex> accepted_order;
  std::vector<Accepted> accepted(store_.vertex_count(), Accepted{plan_.groups.size(), 0});
  std::vector<std::vector<Layer>> group_layers;

  for (std::size_t gi = 0; gi < plan_.groups.size(); ++gi) {
    const GroupPlan& g = plan_.groups[gi];
    std::vector<Layer> layers(1);

    std::vector<VertexIndex> seeds;
    const NodePredicate* index_pred = nullptr;
    for (const auto& p : g.seed_predicates)
      if (g.seed_constraint && p.constraint == *g.seed_constraint) index_pred = &p;
    if (index_pred && index_pred->kind == NodePredicate::Kind::Attribute) {
      seeds = store_.match_attribute(g.seed_class, index_pred->attribute, index_pred->predicate);
    } else if (index_pred && !index_pred->negate_instance) {
      if (auto v = store_.index_of(index_pred->vertex);
          v && store_.vertex(*v).cls == g.seed_class)
        seeds.push_back(*v);
    } else {
      auto members = store_.class_members(g.seed_class);
      seeds.assign(members.begin(), members.end());
    }
    // The index already applied its own predicate.
    bool indexed = index_pred && (index_pred->kind == NodePredicate::Kind::Attribute ||
                                  !index_pred->negate_instance);
    std::vector<NodePredicate> residual;
    for (const auto& p : g.seed_predicates)
      if (!indexed || &p != index_pred) residual.push_back(p);
    layers[0].vertices.reserve(seeds.size());
    layers[0].pred.reserve(seeds.size());
    layers[0].via.reserve(seeds.size());
    for (VertexIndex v : seeds) {
      touch(v);
      if (!all_hold(residual, v) || !filters_pass(g.seed_filters, v)) continue;
      layers[0].vertices.push_back(v);
      layers[0].pred.push_back(0);
      layers[0].via.push_back(0);
    }
    for (const auto& f : g.seed_filters) hops_ += branch_hops(f);

    for (const auto& h : g.hops) {
      ++hops_;
      for (const auto& f : h.filters) hops_ += branch_hops(f);
      Layer next;
      ++current_stamp_;
      const Layer& cur = layers.back();
      for (std::size_t i = 0; i < cur.vertices.size(); ++i) {
        for_each_adjacent(cur.vertices[i], h.edge, h.direction, h.cls, [&](const AdjacentEdge& a) {
          if (stamp_[a.neighbor] == current_stamp_) return false;
          stamp_[a.neighbor] = current_stamp_;
          if (!all_hold(h.predicates, a.neighbor) || !filters_pass(h.filters, a.neighbor)) return false;
          next.vertices.push_back(a.neighbor);
          next.pred.push_back(i);
          next.via.push_back(a.edge);
          return false;
        });
      }
      layers.push_back(std::move(next));
    }
    for (const auto& aj : g.anti_joins)
      if (aj.branch) hops_ += branch_hops(*aj.branch);

    const Layer& last = layers.back();
    for (std::size_t i = 0; i < last.vertices.size(); ++i) {
      VertexIndex t = last.vertices[i];
      bool excluded = false;
      for (const auto& aj : g.anti_joins) {
        bool holds_here = all_hold(aj.root_predicates, t) && (!aj.branch || exists(*aj.branch, t));
        if (holds_here) {
          excluded = true;
          break;
        }
      }
      if (!excluded && accepted[t].group == plan_.groups.size()) {
        accepted[t] = Accepted{gi, i};
        accepted_order.push_back(t);
      }
    }
    group_layers.push_back(std::move(layers));
  }

  sort_unique(accepted_order, store_.vertex_count());
  // Binding rows list a group's constraints in index order.
  std::vector<std::vector<std::pair<std::size_t, bool>>> group_constraints;
  for (const auto& g : plan_.groups) {
    auto& list = group_constraints.emplace_back();
    for (std::size_t c : g.positive) list.emplace_back(c, false);
    for (std::size_t c : g.negated) list.emplace_back(c, true);
    std::sort(list.begin(), list.end());
  }
  out.answers.reserve(accepted_order.size());
  std::vector<VertexIndex> sub_vertices;
  std::vector<std::uint32_t> sub_edges;
  Assignment assign(plan_.node_parents.size(), kUnset);
  std::vector<std::uint32_t> edges;
  for (VertexIndex t : accepted_order) {
    const Accepted& acc = accepted[t];
    out.answers.push_back(t);
    sub_vertices.push_back(t);
    const GroupPlan& g = plan_.groups[acc.group];
    const auto& layers = group_layers[acc.group];

    std::fill(assign.begin(), assign.end(), kUnset);
    edges.clear();
    std::size_t idx = acc.layer_index;
    for (std::size_t l = layers.size(); l-- > 0;) {
      std::size_t node = l == 0 ? g.seed_node : g.hops[l - 1].node;
      VertexIndex v = layers[l].vertices[idx];
      assign[node] = v;
      const auto& filters = l == 0 ? g.seed_filters : g.hops[l - 1].filters;
      for (const auto& f : filters) witness(f, v, assign, edges);
      if (l > 0) {
        edges.push_back(layers[l].via[idx]);
        idx = layers[l].pred[idx];
      }
    }
    sub_edges.insert(sub_edges.end(), edges.begin(), edges.end());
    for (VertexIndex v : assign)
      if (v != kUnset) sub_vertices.push_back(v);

    for (const auto& [c, negated] : group_constraints[acc.group]) {
      BindingRow& row = out.bindings.emplace_back();
      row.answer = store_.vertex(t).id;
      row.constraint = c;
      if (negated) continue;
      for (std::optional<std::size_t> k = plan_.bindings[c]; k; k = plan_.node_parents[*k])
        row.witness_ids.push_back(store_.vertex(assign[*k]).id);
    }
  }
  sort_unique(sub_vertices, store_.vertex_count());
  sort_unique(sub_edges, store_.edges().size());
  out.subgraph_vertices = std::move(sub_vertices);
  out.subgraph_edges = std::move(sub_edges);
  out.stats.hops = hops_;
  out.stats.vertices_touched = touched_count_;
  return out;
}

}  // namespace

AnswerGraph execute(const GraphStore& store, const TraversalPlan& plan) {
  auto start = std::chrono::steady_clock::now();
  Executor ex(store, plan);
  AnswerGraph out = ex.run();
  out.pseudo_query = plan.pseudo_query();
  auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  out.stats.elapsed_ms = static_cast<double>(std::max<std::int64_t>(ns, 1)) / 1e6;
  return out;
}

std::vector<std::string> AnswerGraph::answer_ids(const GraphStore& store) const {
  std::vector<std::string> ids;
  for (VertexIndex v : answers) ids.push_back(store.vertex(v).id);
  return ids;
}

json vertex_to_json(const Vertex& v) {
  json attrs = json::object();
  for (const auto& [k, val] : v.attrs) attrs[k] = value_to_json(val);
  return {{"id", v.id}, {"class", v.cls}, {"attrs", attrs}};
}

json edge_to_json(const Edge& e) {
  json j{{"src", e.src}, {"dst", e.dst}, {"type", e.type}};
  if (!e.attrs.empty()) {
    json attrs = json::object();
    for (const auto& [k, val] : e.attrs) attrs[k] = value_to_json(val);
    j["attrs"] = attrs;
  }
  return j;
}

json AnswerGraph::to_json(const GraphStore& store, bool with_timing) const {
  json j;
  j["target"] = target;
  j["type"] = to_string(type);
  j["answers"] = json::array();
  for (VertexIndex v : answers) j["answers"].push_back(vertex_to_json(store.vertex(v)));
  if (type == QuestionType::Count) j["count"] = answers.size();
  if (target_attribute) {
    j["projection"] = json::array();
    for (VertexIndex v : answers) {
      const Value* val = store.vertex(v).attr(*target_attribute);
      j["projection"].push_back({{"id", store.vertex(v).id},
                                 {*target_attribute, val ? value_to_json(*val) : json(nullptr)}});
    }
  }
  json sv = json::array();
  for (VertexIndex v : subgraph_vertices) sv.push_back(vertex_to_json(store.vertex(v)));
  json se = json::array();
  for (auto e : subgraph_edges) se.push_back(edge_to_json(store.edge(e)));
  j["subgraph"] = {{"vertices", sv}, {"edges", se}};
  j["bindings"] = json::array();
  for (const auto& b : bindings)
    j["bindings"].push_back(
        {{"answer", b.answer}, {"constraint_index", b.constraint}, {"witness_ids", b.witness_ids}});
  j["stats"] = {{"hops", stats.hops}, {"vertices_touched", stats.vertices_touched}};
  if (with_timing) j["stats"]["elapsed_ms"] = stats.elapsed_ms;
  j["pseudo_query"] = pseudo_query;
  j["empty"] = empty();
  if (empty()) j["explanation"] = "no " + target + " satisfies every constraint";
  return j;
}

}  // namespace gridqa
