#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "gridqa/corpus.hpp"
#include "gridqa/error.hpp"

namespace gridqa {

using nlohmann::json;

json EvalCase::to_json() const {
  json j{{"id", id},
         {"template", template_name},
         {"question", question},
         {"hop", multi_hop ? "multi" : "single"},
         {"condition", multi_condition ? "multi" : "single"}};
  if (deps) j["deps"] = *deps;
  if (!previous.empty()) j["previous"] = previous;
  if (merged_question) j["merged_question"] = *merged_question;
  if (expected) j["expected"] = *expected;
  if (expected_error) j["expected_error"] = *expected_error;
  return j;
}

EvalCase EvalCase::from_json(const json& j) {
  EvalCase c;
  try {
    c.id = j.at("id").get<std::string>();
    c.template_name = j.value("template", "");
    c.question = j.at("question").get<std::string>();
    if (j.contains("deps") && j["deps"].is_string()) c.deps = j["deps"].get<std::string>();
    if (j.contains("previous")) c.previous = j["previous"].get<std::vector<std::string>>();
    if (j.contains("merged_question")) c.merged_question = j["merged_question"].get<std::string>();
    c.multi_hop = j.at("hop").get<std::string>() == "multi";
    c.multi_condition = j.at("condition").get<std::string>() == "multi";
    if (j.contains("expected")) {
      auto ids = j["expected"].get<std::vector<std::string>>();
      std::sort(ids.begin(), ids.end());
      c.expected = std::move(ids);
    }
    if (j.contains("expected_error")) c.expected_error = j["expected_error"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed corpus case: ") + e.what());
  }
  if (!c.expected == !c.expected_error)
    throw Error(ErrorCode::ValidationError, "case " + c.id + " needs exactly one of expected/expected_error");
  return c;
}

std::vector<EvalCase> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) throw Error(ErrorCode::ParseError, path.string() + " is not a JSON array");
  std::vector<EvalCase> out;
  for (const auto& c : j) out.push_back(EvalCase::from_json(c));
  return out;
}

json corpus_to_json(const std::vector<EvalCase>& cases) {
  json a = json::array();
  for (const auto& c : cases) a.push_back(c.to_json());
  return a;
}

namespace {

// Draws are built from raw engine output so files do not depend on the
// standard library's distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

 private:
  std::mt19937_64 engine_;
};

std::string pad(const char* prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

std::string iso(int y, int m, int d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

std::string random_date(Rng& rng, int first_year, int last_year) {
  int y = first_year + static_cast<int>(rng.below(static_cast<std::size_t>(last_year - first_year + 1)));
  int m = 1 + static_cast<int>(rng.below(12));
  int d = 1 + static_cast<int>(rng.below(28));
  return iso(y, m, d);
}

const std::vector<std::string> kDefectTypes{"oil leakage", "overheating", "insulation aging",
                                            "partial discharge", "bushing crack"};
const std::vector<std::string> kSeverities{"minor", "major", "critical"};
const std::vector<double> kCapacities{31.5, 50.0, 63.0, 90.0, 120.0, 180.0, 240.0, 360.0};
const std::vector<std::string> kNumberWords{"zero", "one", "two", "three", "four", "five",
                                            "six", "seven", "eight", "nine", "ten"};

struct GVertex {
  std::string id;
  std::string cls;
  json attrs;
};

/// Generated graph with plain adjacency maps; the expected-answer checks
/// below read only this structure.
class World {
 public:
  std::vector<GVertex> vertices;
  std::vector<json> edges;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::vector<std::string>> by_class;

  void add_vertex(std::string id, std::string cls, json attrs) {
    index[id] = vertices.size();
    by_class[cls].push_back(id);
    vertices.push_back({std::move(id), std::move(cls), std::move(attrs)});
  }
  void add_edge(const std::string& src, const std::string& dst, const std::string& type) {
    edges.push_back({{"src", src}, {"dst", dst}, {"type", type}});
    out_[src][type].push_back(dst);
    in_[dst][type].push_back(src);
  }

  const std::vector<std::string>& out(const std::string& v, const std::string& type) const {
    return lookup(out_, v, type);
  }
  const std::vector<std::string>& in(const std::string& v, const std::string& type) const {
    return lookup(in_, v, type);
  }
  const json& attr(const std::string& v, const std::string& key) const {
    static const json null;
    const json& a = vertices[index.at(v)].attrs;
    auto it = a.find(key);
    return it == a.end() ? null : *it;
  }
  std::string name(const std::string& v) const { return attr(v, "name").get<std::string>(); }
  const std::vector<std::string>& members(const std::string& cls) const {
    static const std::vector<std::string> none;
    auto it = by_class.find(cls);
    return it == by_class.end() ? none : it->second;
  }

  bool has_defect(const std::string& t, const std::function<bool(const std::string&)>& pred) const {
    const auto& ds = out(t, "hasDefect");
    return std::any_of(ds.begin(), ds.end(), pred);
  }
  bool has_defect_type(const std::string& t, const std::string& type) const {
    return has_defect(t, [&](const std::string& d) { return attr(d, "defect_type") == type; });
  }
  std::optional<std::string> one(const std::string& v, const std::string& type) const {
    const auto& o = out(v, type);
    if (o.empty()) return std::nullopt;
    return o.front();
  }

 private:
  using Adjacency = std::map<std::string, std::map<std::string, std::vector<std::string>>>;
  static const std::vector<std::string>& lookup(const Adjacency& adj, const std::string& v,
                                                const std::string& type) {
    static const std::vector<std::string> none;
    auto it = adj.find(v);
    if (it == adj.end()) return none;
    auto jt = it->second.find(type);
    return jt == it->second.end() ? none : jt->second;
  }
  Adjacency out_, in_;
};

World build_world(const GenerateOptions& opt, Rng& rng) {
  World w;
  std::vector<std::pair<std::string, std::pair<std::string, json>>> catalog;
  auto cat = [&](std::string id, std::string cls, json attrs) {
    catalog.push_back({std::move(id), {std::move(cls), std::move(attrs)}});
  };
  cat("U1", "Utility", {{"name", "California power grid"}});
  cat("U2", "Utility", {{"name", "State Grid Corp"}});
  cat("U3", "Utility", {{"name", "Texas power grid"}});
  const char* regions[] = {"North Valley", "South Coast", "East Plains", "West Ridge", "Central Basin"};
  for (int i = 0; i < 5; ++i) cat("R" + std::to_string(i + 1), "Region", {{"name", regions[i]}});
  for (int kv : {35, 110, 220, 330, 500, 750})
    cat(pad("V", static_cast<std::size_t>(kv), 3), "VoltageLevel",
        {{"name", "VL-" + std::to_string(kv)}, {"kv", kv}});
  const char* makers[] = {"Acme Electric",    "Borealis Works",   "Corona Industries",
                          "Delta Dynamo",     "Everest Heavy",    "Falcon Magnetics",
                          "Granite Electric", "Helios Machinery", "Ionic Systems",
                          "Juniper Electric", "Kestrel Works",    "Lumen Heavy"};
  const char* countries[] = {"US", "CN", "DE", "JP"};
  for (std::size_t i = 0; i < 12; ++i)
    cat(pad("M", i + 1, 2), "Manufacturer", {{"name", makers[i]}, {"country", countries[i % 4]}});
  const char* types[] = {"Core design", "Shell design", "Dry design"};
  for (int i = 0; i < 3; ++i) cat("E" + std::to_string(i + 1), "EquipmentType", {{"name", types[i]}});
  const char* suppliers[] = {"Northwind Supply", "Harbor Logistics", "Summit Trading", "Orion Distribution"};
  for (int i = 0; i < 4; ++i) cat("P" + std::to_string(i + 1), "Supplier", {{"name", suppliers[i]}});
  const char* departments[] = {"Grid Operations East", "Grid Operations West", "Field Services North",
                               "Field Services South"};
  for (int i = 0; i < 4; ++i) cat("DP" + std::to_string(i + 1), "Department", {{"name", departments[i]}});

  const std::size_t n = opt.vertices;
  for (std::size_t i = 0; i < catalog.size() && i < n; ++i)
    w.add_vertex(catalog[i].first, catalog[i].second.first, catalog[i].second.second);
  auto exists = [&](const std::string& id) { return w.index.count(id) > 0; };
  auto link = [&](const std::string& s, const std::string& d, const std::string& t) {
    if (exists(s) && exists(d)) w.add_edge(s, d, t);
  };
  link("U1", "R1", "servesRegion");
  link("U1", "R2", "servesRegion");
  link("U2", "R3", "servesRegion");
  link("U2", "R4", "servesRegion");
  link("U3", "R5", "servesRegion");
  link("DP1", "U1", "partOf");
  link("DP2", "U1", "partOf");
  link("DP3", "U2", "partOf");
  link("DP4", "U3", "partOf");
  for (std::size_t i = 0; i < 12; ++i) link("P" + std::to_string(i % 4 + 1), pad("M", i + 1, 2), "distributes");

  const std::size_t rest = n > catalog.size() ? n - catalog.size() : 0;
  const std::size_t substations = rest / 10;
  const std::size_t transformers = rest * 55 / 100;
  const std::size_t defects = rest - substations - transformers;

  const auto utilities = w.members("Utility");
  for (std::size_t i = 1; i <= substations; ++i) {
    std::string id = pad("S", i, 4);
    w.add_vertex(id, "Substation", {{"name", pad("SS-", i, 4)}});
    if (!utilities.empty()) {
      const std::string& u = rng.pick(utilities);
      w.add_edge(id, u, "ownedBy");
      const auto& served = w.out(u, "servesRegion");
      if (!served.empty()) w.add_edge(id, rng.pick(served), "inRegion");
      const auto& depts = w.in(u, "partOf");
      if (!depts.empty()) w.add_edge(id, rng.pick(depts), "managedBy");
    }
  }
  const auto subs = w.members("Substation");
  const auto manufacturers = w.members("Manufacturer");
  const auto levels = w.members("VoltageLevel");
  const auto equipment = w.members("EquipmentType");
  for (std::size_t i = 1; i <= transformers; ++i) {
    std::string id = pad("T", i, 5);
    w.add_vertex(id, "Transformer",
                 {{"name", pad("TX-", i, 5)},
                  {"commission_date", random_date(rng, 2000, 2024)},
                  {"capacity_mva", rng.pick(kCapacities)}});
    if (!manufacturers.empty()) {
      const std::string& m = rng.pick(manufacturers);
      w.add_edge(id, m, "madeBy");
      const auto& sellers = w.in(m, "distributes");
      if (!sellers.empty() && rng.chance(0.6 * opt.density)) w.add_edge(id, rng.pick(sellers), "suppliedBy");
    }
    if (!subs.empty()) w.add_edge(id, rng.pick(subs), "locatedIn");
    if (!levels.empty()) w.add_edge(id, rng.pick(levels), "hasVoltage");
    if (!equipment.empty() && rng.chance(opt.density)) w.add_edge(id, rng.pick(equipment), "ofType");
  }
  const auto txs = w.members("Transformer");
  for (std::size_t i = 1; i <= defects; ++i) {
    std::string id = pad("D", i, 5);
    double s = rng.unit();
    w.add_vertex(id, "DefectRecord",
                 {{"defect_type", rng.pick(kDefectTypes)},
                  {"found_date", random_date(rng, 2015, 2024)},
                  {"severity", s < 0.5 ? "minor" : (s < 0.85 ? "major" : "critical")}});
    if (!txs.empty()) w.add_edge(rng.pick(txs), id, "hasDefect");
  }
  return w;
}

// ---------------------------------------------------------------------------
// Question templates. Each returns the question and the expected answer set
// computed directly from the generated graph.

struct Draft {
  std::string question;
  std::vector<std::string> previous;
  std::optional<std::string> merged;
  std::vector<std::string> expected;
};

struct Template {
  std::string name;
  bool multi_hop;
  bool multi_condition;
  std::function<Draft(const World&, Rng&)> make;
};

std::vector<std::string> select(const World& w, const std::string& cls,
                                const std::function<bool(const std::string&)>& pred) {
  std::vector<std::string> out;
  for (const auto& v : w.members(cls))
    if (pred(v)) out.push_back(v);
  return out;
}

std::string fmt_capacity(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, c == static_cast<long>(c) ? "%.0f" : "%.1f", c);
  return buf;
}

int year_of_iso(const std::string& d) { return std::stoi(d.substr(0, 4)); }

std::vector<Template> templates() {
  std::vector<Template> t;
  t.push_back({"made_by", false, false, [](const World& w, Rng& r) {
                 std::string m = r.pick(w.members("Manufacturer"));
                 return Draft{"Which transformers were made by " + w.name(m) + "?", {}, {},
                              select(w, "Transformer", [&](const std::string& x) { return w.one(x, "madeBy") == m; })};
               }});
  t.push_back({"has_defect", false, false, [](const World& w, Rng& r) {
                 std::string d = r.pick(kDefectTypes);
                 return Draft{"Which transformers have " + d + "?", {}, {},
                              select(w, "Transformer", [&](const std::string& x) { return w.has_defect_type(x, d); })};
               }});
  t.push_back({"capacity_above", false, false, [](const World& w, Rng& r) {
                 double c = kCapacities[1 + r.below(kCapacities.size() - 2)];
                 return Draft{"Which transformers have capacity above " + fmt_capacity(c) + " MVA?", {}, {},
                              select(w, "Transformer", [&](const std::string& x) {
                                return w.attr(x, "capacity_mva").get<double>() > c;
                              })};
               }});
  t.push_back({"count_made_by", false, false, [](const World& w, Rng& r) {
                 std::string m = r.pick(w.members("Manufacturer"));
                 return Draft{"How many transformers were made by " + w.name(m) + "?", {}, {},
                              select(w, "Transformer", [&](const std::string& x) { return w.one(x, "madeBy") == m; })};
               }});
  t.push_back({"commissioned_before", false, false, [](const World& w, Rng& r) {
                 std::string date = iso(2003 + static_cast<int>(r.below(15)), 1 + static_cast<int>(r.below(12)), 1);
                 return Draft{"Which transformers were commissioned before " + date + "?", {}, {},
                              select(w, "Transformer", [&](const std::string& x) {
                                return w.attr(x, "commission_date").get<std::string>() < date;
                              })};
               }});
  t.push_back({"substations_with_defect", true, false, [](const World& w, Rng& r) {
                 std::string d = r.pick(kDefectTypes);
                 return Draft{"Which substations have " + d + "?", {}, {},
                              select(w, "Substation", [&](const std::string& s) {
                                const auto& ts = w.in(s, "locatedIn");
                                return std::any_of(ts.begin(), ts.end(),
                                                   [&](const std::string& x) { return w.has_defect_type(x, d); });
                              })};
               }});
  auto makers_kv_defect = [](const World& w, int kv, const std::string& d) {
    return select(w, "Manufacturer", [&](const std::string& m) {
      const auto& ts = w.in(m, "madeBy");
      return std::any_of(ts.begin(), ts.end(), [&](const std::string& x) {
        auto v = w.one(x, "hasVoltage");
        return v && w.attr(*v, "kv") == kv && w.has_defect_type(x, d);
      });
    });
  };
  t.push_back({"makers_kv_defect", true, true, [makers_kv_defect](const World& w, Rng& r) {
                 const std::string& v = r.pick(w.members("VoltageLevel"));
                 int kv = w.attr(v, "kv").get<int>();
                 std::string d = r.pick(kDefectTypes);
                 return Draft{"Which manufacturers made " + std::to_string(kv) + "kV transformers with " + d + "?",
                              {}, {}, makers_kv_defect(w, kv, d)};
               }});
  t.push_back({"utility_defect_window", true, true, [](const World& w, Rng& r) {
                 std::string u = r.pick(w.members("Utility"));
                 std::string d = r.pick(kDefectTypes);
                 int n = 3 + static_cast<int>(r.below(6));
                 int year = 2017 + static_cast<int>(r.below(8));
                 std::string lo = iso(year - n, 12, 31), hi = iso(year, 12, 31);
                 return Draft{"Which transformers in the " + w.name(u) + " have " + d + " within " +
                                  kNumberWords[static_cast<std::size_t>(n)] + " years of operation in " +
                                  std::to_string(year) + "?",
                              {}, {},
                              select(w, "Transformer", [&](const std::string& x) {
                                auto s = w.one(x, "locatedIn");
                                if (!s || w.one(*s, "ownedBy") != u) return false;
                                std::string cd = w.attr(x, "commission_date").get<std::string>();
                                if (cd < lo || cd > hi) return false;
                                return w.has_defect(x, [&](const std::string& dr) {
                                  return w.attr(dr, "defect_type") == d &&
                                         year_of_iso(w.attr(dr, "found_date").get<std::string>()) == year;
                                });
                              })};
               }});
  t.push_back({"defect_or", false, true, [](const World& w, Rng& r) {
                 std::size_t a = r.below(kDefectTypes.size());
                 std::size_t b = (a + 1 + r.below(kDefectTypes.size() - 1)) % kDefectTypes.size();
                 const std::string &d1 = kDefectTypes[a], &d2 = kDefectTypes[b];
                 return Draft{"Which transformers have " + d1 + " or " + d2 + "?", {}, {},
                              select(w, "Transformer", [&](const std::string& x) {
                                return w.has_defect_type(x, d1) || w.has_defect_type(x, d2);
                              })};
               }});
  t.push_back({"made_by_without_defect", true, true, [](const World& w, Rng& r) {
                 std::string m = r.pick(w.members("Manufacturer"));
                 std::string d = r.pick(kDefectTypes);
                 return Draft{"Which transformers made by " + w.name(m) + " have no " + d + "?", {}, {},
                              select(w, "Transformer", [&](const std::string& x) {
                                return w.one(x, "madeBy") == m && !w.has_defect_type(x, d);
                              })};
               }});
  t.push_back({"region_severity", true, true, [](const World& w, Rng& r) {
                 std::string reg = r.pick(w.members("Region"));
                 std::string sev = r.pick(kSeverities);
                 return Draft{"Which transformers in " + w.name(reg) + " have " + sev + " defects?", {}, {},
                              select(w, "Transformer", [&](const std::string& x) {
                                auto s = w.one(x, "locatedIn");
                                if (!s || w.one(*s, "inRegion") != reg) return false;
                                return w.has_defect(x, [&](const std::string& dr) { return w.attr(dr, "severity") == sev; });
                              })};
               }});
  t.push_back({"kv_capacity", false, true, [](const World& w, Rng& r) {
                 const std::string& v = r.pick(w.members("VoltageLevel"));
                 int kv = w.attr(v, "kv").get<int>();
                 double c = kCapacities[r.below(kCapacities.size() - 1)];
                 return Draft{"Which transformers at " + std::to_string(kv) + "kV have capacity at least " +
                                  fmt_capacity(c) + " MVA?",
                              {}, {},
                              select(w, "Transformer", [&](const std::string& x) {
                                auto lv = w.one(x, "hasVoltage");
                                return lv && w.attr(*lv, "kv") == kv && w.attr(x, "capacity_mva").get<double>() >= c;
                              })};
               }});
  t.push_back({"supplier_capacity", false, true, [](const World& w, Rng& r) {
                 std::string p = r.pick(w.members("Supplier"));
                 double c = kCapacities[2 + r.below(kCapacities.size() - 2)];
                 return Draft{"List transformers supplied by " + w.name(p) + " with capacity below " +
                                  fmt_capacity(c) + " MVA",
                              {}, {},
                              select(w, "Transformer", [&](const std::string& x) {
                                return w.one(x, "suppliedBy") == p && w.attr(x, "capacity_mva").get<double>() < c;
                              })};
               }});
  t.push_back({"count_owned_substations", false, false, [](const World& w, Rng& r) {
                 std::string u = r.pick(w.members("Utility"));
                 return Draft{"How many substations are owned by " + w.name(u) + "?", {}, {},
                              select(w, "Substation", [&](const std::string& s) { return w.one(s, "ownedBy") == u; })};
               }});
  t.push_back({"made_by_recent", false, true, [](const World& w, Rng& r) {
                 std::string m = r.pick(w.members("Manufacturer"));
                 int n = 2 + static_cast<int>(r.below(8));
                 std::string lo = iso(2024 - n, 12, 31), hi = iso(2024, 12, 31);
                 return Draft{"Which transformers made by " + w.name(m) + " were commissioned within " +
                                  std::to_string(n) + " years?",
                              {}, {},
                              select(w, "Transformer", [&](const std::string& x) {
                                std::string cd = w.attr(x, "commission_date").get<std::string>();
                                return w.one(x, "madeBy") == m && cd >= lo && cd <= hi;
                              })};
               }});
  t.push_back({"makers_in_region", true, true, [](const World& w, Rng& r) {
                 std::string reg = r.pick(w.members("Region"));
                 return Draft{"Which manufacturers made transformers in " + w.name(reg) + "?", {}, {},
                              select(w, "Manufacturer", [&](const std::string& m) {
                                const auto& ts = w.in(m, "madeBy");
                                return std::any_of(ts.begin(), ts.end(), [&](const std::string& x) {
                                  auto s = w.one(x, "locatedIn");
                                  return s && w.one(*s, "inRegion") == reg;
                                });
                              })};
               }});
  t.push_back({"defects_found_in_year", false, false, [](const World& w, Rng& r) {
                 int year = 2015 + static_cast<int>(r.below(10));
                 return Draft{"Which defect records were found in " + std::to_string(year) + "?", {}, {},
                              select(w, "DefectRecord", [&](const std::string& d) {
                                return year_of_iso(w.attr(d, "found_date").get<std::string>()) == year;
                              })};
               }});
  t.push_back({"follow_up_voltage", true, true, [makers_kv_defect](const World& w, Rng& r) {
                 const std::string& v = r.pick(w.members("VoltageLevel"));
                 int kv = w.attr(v, "kv").get<int>();
                 std::string d = r.pick(kDefectTypes);
                 std::string k = std::to_string(kv) + "kV";
                 return Draft{"only " + k,
                              {"Which manufacturers made transformers with " + d + "?"},
                              "Which manufacturers made " + k + " transformers with " + d + "?",
                              makers_kv_defect(w, kv, d)};
               }});
  return t;
}

std::string dump_lines(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

GeneratedData generate(const GenerateOptions& options) {
  if (!(options.density > 0.0) || options.density > 1.0)
    throw Error(ErrorCode::ValidationError, "density must lie in (0, 1]");
  Rng rng(options.seed);
  World w = build_world(options, rng);

  GeneratedData out;
  out.schema = json::parse(bundled_schema_json()).dump(2) + "\n";
  out.lexicon = json::parse(bundled_lexicon_json()).dump(2) + "\n";
  std::vector<json> vrows;
  for (const auto& v : w.vertices) vrows.push_back({{"id", v.id}, {"class", v.cls}, {"attrs", v.attrs}});
  out.vertices = dump_lines(vrows);
  out.edges = dump_lines(w.edges);

  // Cases need the full catalog and some of every generated class.
  bool populated = !w.members("Transformer").empty() && !w.members("Substation").empty() &&
                   !w.members("DefectRecord").empty() && w.members("Supplier").size() == 4;
  if (!populated) return out;

  const auto tpl = templates();
  for (std::size_t i = 0; i < options.cases; ++i) {
    const Template& t = tpl[i % tpl.size()];
    Draft d;
    // Resample a few times so cases prefer non-empty answers.
    for (int attempt = 0; attempt < 20; ++attempt) {
      d = t.make(w, rng);
      if (!d.expected.empty()) break;
    }
    EvalCase c;
    c.id = pad("case-", i + 1, 3);
    c.template_name = t.name;
    c.question = d.question;
    c.previous = d.previous;
    c.merged_question = d.merged;
    c.multi_hop = t.multi_hop;
    c.multi_condition = t.multi_condition;
    std::sort(d.expected.begin(), d.expected.end());
    c.expected = d.expected;
    out.cases.push_back(std::move(c));
  }
  return out;
}

void write_generated(const GeneratedData& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
    f << text;
  };
  write("schema.json", data.schema);
  write("vertices.jsonl", data.vertices);
  write("edges.jsonl", data.edges);
  write("lexicon.json", data.lexicon);
  write("corpus.json", corpus_to_json(data.cases).dump(2) + "\n");
}

}  // namespace gridqa
