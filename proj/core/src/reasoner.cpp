#include "gridqa/reasoner.hpp"

#include <algorithm>
#include <numeric>

#include "gridqa/error.hpp"

namespace gridqa {

using nlohmann::json;

std::vector<std::size_t> ReasoningPath::reversed_steps() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (steps[i].reversed()) out.push_back(i);
  return out;
}

namespace {

using DistanceMap = std::map<std::string, std::size_t, std::less<>>;

/// Walks from `from` towards the zero of `dist`, always taking the first
/// neighbor (in adjacency order) that decreases the distance.
std::vector<PathStep> greedy_descent(const SchemaGraph& graph, std::string_view from,
                                     const DistanceMap& dist) {
  std::vector<PathStep> steps;
  std::string cur(from);
  auto d = dist.find(cur);
  if (d == dist.end()) throw Error(ErrorCode::NoPath, "no schema path from " + cur);
  std::size_t remaining = d->second;
  while (remaining > 0) {
    bool moved = false;
    for (const auto& nb : graph.neighbors(cur)) {
      auto it = dist.find(nb.neighbor);
      if (it == dist.end() || it->second + 1 != remaining) continue;
      steps.push_back({nb.edge_type, nb.direction, cur, nb.neighbor});
      cur = nb.neighbor;
      --remaining;
      moved = true;
      break;
    }
    if (!moved) throw Error(ErrorCode::NoPath, "no schema path from " + std::string(from));
  }
  return steps;
}

}  // namespace

ReasoningPath shortest_path(const SchemaGraph& graph, std::string_view from, std::string_view to,
                            std::span<const ReasoningPath> existing) {
  if (!graph.contains(from)) throw Error(ErrorCode::NoPath, "unknown class '" + std::string(from) + "'");
  if (!graph.contains(to)) throw Error(ErrorCode::NoPath, "unknown class '" + std::string(to) + "'");
  ReasoningPath out;
  out.start = std::string(from);
  if (from == to) return out;

  DistanceMap to_target = graph.distances_from(to);
  auto total = to_target.find(from);
  if (total == to_target.end())
    throw Error(ErrorCode::NoPath,
                "no schema path from " + std::string(from) + " to " + std::string(to));

  // Splice candidates: classes of existing paths lying on a shortest route.
  struct Splice {
    std::size_t prefix;
    std::string cls;
    const ReasoningPath* path;
    std::size_t step;
  };
  std::optional<Splice> best;
  if (!existing.empty()) {
    DistanceMap from_anchor = graph.distances_from(from);
    for (const auto& p : existing) {
      if (p.end() != to) continue;  // only routes into the same target can be shared
      for (std::size_t i = 0; i < p.steps.size(); ++i) {
        const std::string& x = p.steps[i].from;
        auto dx = from_anchor.find(x);
        auto dt = to_target.find(x);
        if (dx == from_anchor.end() || dt == to_target.end()) continue;
        if (dx->second + dt->second != total->second) continue;
        // A forced first hop can make the remainder longer than the distance.
        if (p.steps.size() - i != dt->second) continue;
        if (!best || dx->second < best->prefix ||
            (dx->second == best->prefix && x < best->cls))
          best = Splice{dx->second, x, &p, i};
      }
    }
  }
  if (best) {
    out.steps = greedy_descent(graph, from, graph.distances_from(best->cls));
    out.steps.insert(out.steps.end(), best->path->steps.begin() + best->step,
                     best->path->steps.end());
    return out;
  }
  out.steps = greedy_descent(graph, from, to_target);
  return out;
}

std::vector<std::size_t> ReasoningPlan::children(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].parent == node) out.push_back(i);
  return out;
}

std::size_t ReasoningPlan::max_depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

json ReasoningPlan::to_json() const {
  json j{{"target", target}, {"order", order}};
  j["paths"] = json::array();
  for (const auto& p : paths) {
    json steps = json::array();
    for (const auto& s : p.steps)
      steps.push_back({{"edge", s.edge_type},
                       {"from", s.from},
                       {"to", s.to},
                       {"direction", to_string(s.direction)},
                       {"reversed", s.reversed()}});
    j["paths"].push_back({{"constraint", p.anchor},
                          {"anchor", p.start},
                          {"length", p.length()},
                          {"steps", steps},
                          {"reversed_steps", p.reversed_steps()}});
  }
  j["nodes"] = json::array();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    json node{{"id", i}, {"class", n.cls}, {"depth", n.depth}};
    if (n.parent) {
      node["parent"] = *n.parent;
      node["edge"] = n.edge;
      node["direction"] = to_string(n.direction);
    } else {
      node["parent"] = nullptr;
    }
    j["nodes"].push_back(std::move(node));
  }
  j["bindings"] = json::array();
  for (std::size_t c = 0; c < bindings.size(); ++c)
    j["bindings"].push_back({{"constraint", c}, {"node", bindings[c]}});
  j["route"] = json::array();
  for (const auto& r : route)
    j["route"].push_back({{"from", r.from},
                          {"to", r.to},
                          {"from_class", nodes[r.from].cls},
                          {"to_class", nodes[r.to].cls},
                          {"edge", r.edge},
                          {"reversed", r.reversed}});
  return j;
}

ConstraintAnchor constraint_anchor(const OntologySchema& schema, const SchemaGraph& graph,
                                   const Constraint& c, std::string_view target) {
  if (c.kind != ConstraintKind::Edge) {
    if (!graph.contains(c.cls))
      throw Error(ErrorCode::NoPath, "constraint anchor '" + c.cls + "' is not a schema class");
    return {c.cls, std::nullopt};
  }
  auto defs = schema.find_edge_types(c.edge);
  if (defs.empty()) throw Error(ErrorCode::NoPath, "unknown edge type '" + c.edge + "'");
  auto dist = graph.distances_from(target);
  auto d = [&](const std::string& cls) {
    auto it = dist.find(cls);
    if (it == dist.end()) throw Error(ErrorCode::NoPath, "class '" + cls + "' is unreachable");
    return it->second;
  };
  const EdgeTypeDef* best = nullptr;
  for (const auto* def : defs)
    if (!best || std::min(d(def->from_class), d(def->to_class)) <
                     std::min(d(best->from_class), d(best->to_class)))
      best = def;
  // The endpoint farther from the target anchors; the first hop crosses the edge.
  bool far_is_to = d(best->to_class) >= d(best->from_class);
  ConstraintAnchor out;
  if (far_is_to) {
    out.cls = best->to_class;
    out.forced = PathStep{best->name, Direction::Backward, best->to_class, best->from_class};
  } else {
    out.cls = best->from_class;
    out.forced = PathStep{best->name, Direction::Forward, best->from_class, best->to_class};
  }
  return out;
}

ReasoningPlan plan(const OntologySchema& schema, const SchemaGraph& graph,
                   const ParsedQuestion& parsed, PlanOptions options) {
  if (!parsed.target) throw Error(ErrorCode::UnresolvedTarget, "question has no target");
  const std::string& target = parsed.target->cls;
  if (!graph.contains(target))
    throw Error(ErrorCode::UnresolvedTarget, "target '" + target + "' is not a schema class");

  const std::size_t n = parsed.constraints.size();
  ReasoningPlan out;
  out.target = target;
  out.paths.resize(n);
  out.bindings.assign(n, 0);
  out.nodes.push_back({target, std::nullopt, "", Direction::Forward, 0});

  DistanceMap dist = graph.distances_from(target);
  std::vector<ConstraintAnchor> anchors;
  std::vector<std::size_t> anchor_distance;
  for (const auto& c : parsed.constraints) {
    anchors.push_back(constraint_anchor(schema, graph, c, target));
    auto it = dist.find(anchors.back().cls);
    if (it == dist.end()) throw Error(ErrorCode::NoPath, "anchor '" + anchors.back().cls + "' is unreachable");
    std::size_t d = it->second;
    if (anchors.back().forced) {
      auto near = dist.find(anchors.back().forced->to);
      d = near->second + 1;
    }
    anchor_distance.push_back(d);
  }

  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    return anchor_distance[a] < anchor_distance[b];
  });

  std::vector<ReasoningPath> found;
  for (std::size_t ci : out.order) {
    const ConstraintAnchor& a = anchors[ci];
    std::span<const ReasoningPath> existing;
    if (options.reuse_paths) existing = found;
    ReasoningPath path;
    if (a.forced) {
      ReasoningPath rest = shortest_path(graph, a.forced->to, target, existing);
      path.start = a.cls;
      path.steps.push_back(*a.forced);
      path.steps.insert(path.steps.end(), rest.steps.begin(), rest.steps.end());
    } else {
      path = shortest_path(graph, a.cls, target, existing);
    }
    path.anchor = ci;
    out.paths[ci] = path;
    if (!path.steps.empty()) found.push_back(path);
  }

  // Merge: a trie over paths read from the target outwards.
  for (std::size_t ci : out.order) {
    const ReasoningPath& p = out.paths[ci];
    std::size_t cur = 0;
    for (auto s = p.steps.rbegin(); s != p.steps.rend(); ++s) {
      std::optional<std::size_t> next;
      for (std::size_t k = 1; k < out.nodes.size(); ++k) {
        const PlanNode& node = out.nodes[k];
        if (node.parent == cur && node.edge == s->edge_type && node.direction == s->direction &&
            node.cls == s->from) {
          next = k;
          break;
        }
      }
      if (!next) {
        out.nodes.push_back({s->from, cur, s->edge_type, s->direction, out.nodes[cur].depth + 1});
        next = out.nodes.size() - 1;
      }
      cur = *next;
    }
    out.bindings[ci] = cur;
  }

  // Route: climb from the deepest anchor to the target, then sweep branches.
  if (out.nodes.size() > 1) {
    std::size_t start = 0;
    std::size_t start_constraint = n;
    for (std::size_t ci = 0; ci < n; ++ci) {
      std::size_t node = out.bindings[ci];
      if (start_constraint == n || out.nodes[node].depth > out.nodes[start].depth) {
        start = node;
        start_constraint = ci;
      }
    }
    std::vector<bool> on_spine(out.nodes.size(), false);
    std::vector<std::size_t> spine;
    for (std::size_t cur = start;; cur = *out.nodes[cur].parent) {
      spine.push_back(cur);
      on_spine[cur] = true;
      if (!out.nodes[cur].parent) break;
    }
    for (std::size_t cur : spine) {
      const PlanNode& node = out.nodes[cur];
      if (node.parent) out.route.push_back({cur, *node.parent, node.edge, node.direction == Direction::Backward});
    }
    auto sweep = [&](auto&& self, std::size_t from) -> void {
      for (std::size_t child : out.children(from)) {
        if (on_spine[child]) continue;
        const PlanNode& node = out.nodes[child];
        // Walking parent -> child flips the stored orientation of the hop.
        out.route.push_back({from, child, node.edge, node.direction == Direction::Forward});
        self(self, child);
      }
    };
    for (std::size_t cur : spine) sweep(sweep, cur);
  }
  return out;
}

}  // namespace gridqa
