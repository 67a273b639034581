#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "gridqa/error.hpp"
#include "gridqa/graph_store.hpp"
#include "oracle.hpp"
#include "random_cases.hpp"
#include "support.hpp"

namespace gridqa {
namespace {

const GraphStore& demo() { return testing::demo_engine().store(); }

std::shared_ptr<const OntologySchema> demo_schema() { return demo().schema_ptr(); }

ErrorCode load_error(const std::string& vertices, const std::string& edges) {
  std::istringstream v(vertices), e(edges);
  try {
    GraphStore::load(demo_schema(), v, e);
  } catch (const Error& err) {
    return err.code();
  }
  ADD_FAILURE() << "store loaded";
  return ErrorCode::IoError;
}

TEST(GraphStore, DemoCountsAndAdjacency) {
  const GraphStore& s = demo();
  EXPECT_EQ(s.vertex_count(), 6u);
  EXPECT_EQ(s.edge_count(), 5u);
  std::size_t out = 0, in = 0;
  for (VertexIndex v = 0; v < s.vertex_count(); ++v) {
    out += s.out_edges(v).size();
    in += s.in_edges(v).size();
  }
  EXPECT_EQ(out, 5u);
  EXPECT_EQ(in, 5u);
}

TEST(GraphStore, EmptyEdgeFileGivesEmptyAdjacency) {
  std::istringstream v(testing::read_text(testing::demo_dir() / "vertices.jsonl")), e("");
  auto s = GraphStore::load(demo_schema(), v, e);
  EXPECT_EQ(s.vertex_count(), 6u);
  for (VertexIndex i = 0; i < s.vertex_count(); ++i) {
    EXPECT_TRUE(s.out_edges(i).empty());
    EXPECT_TRUE(s.in_edges(i).empty());
  }
}

TEST(GraphStore, LoadViolations) {
  const std::string vertices = testing::read_text(testing::demo_dir() / "vertices.jsonl");
  EXPECT_EQ(load_error(vertices, R"({"src": "T999", "dst": "M1", "type": "madeBy"})"), ErrorCode::SchemaViolation);
  EXPECT_EQ(load_error(vertices, R"({"src": "T1", "dst": "S1", "type": "madeBy"})"), ErrorCode::SchemaViolation);
  EXPECT_EQ(load_error(vertices, R"({"src": "T1", "dst": "M1", "type": "builtBy"})"), ErrorCode::SchemaViolation);
  EXPECT_EQ(load_error(R"({"id": "X", "class": "Feeder", "attrs": {}})", ""), ErrorCode::SchemaViolation);
  EXPECT_EQ(load_error(R"({"id": "V1", "class": "VoltageLevel", "attrs": {"kv": "high"}})", ""),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(load_error(R"({"id": "V1", "class": "VoltageLevel", "attrs": {"volts": 3}})", ""),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(load_error(vertices + vertices, ""), ErrorCode::SchemaViolation);
  EXPECT_EQ(load_error("{not json", ""), ErrorCode::ParseError);
}

TEST(GraphStore, NeighborsHonorDirection) {
  const GraphStore& s = demo();
  auto t1 = s.neighbors("T1", std::string_view("madeBy"), EdgeDirection::Out);
  ASSERT_EQ(t1.size(), 1u);
  EXPECT_EQ(t1[0].vertex->id, "M1");
  EXPECT_EQ(t1[0].edge->type, "madeBy");
  EXPECT_TRUE(s.neighbors("M1", std::string_view("madeBy"), EdgeDirection::Out).empty());
  auto in = s.neighbors("M1", std::string_view("madeBy"), EdgeDirection::In);
  ASSERT_EQ(in.size(), 2u);
  EXPECT_EQ(in[0].vertex->id, "T1");
  EXPECT_EQ(in[1].vertex->id, "T2");
  EXPECT_THROW(s.neighbors("T999", std::nullopt, EdgeDirection::Both), Error);
}

TEST(GraphStore, BothIsUnionWithoutDuplicates) {
  const GraphStore& s = demo();
  for (const auto& v : s.vertices()) {
    auto out = s.neighbors(v.id, std::nullopt, EdgeDirection::Out);
    auto in = s.neighbors(v.id, std::nullopt, EdgeDirection::In);
    auto both = s.neighbors(v.id, std::nullopt, EdgeDirection::Both);
    EXPECT_EQ(both.size(), out.size() + in.size());
    std::set<const Edge*> seen;
    for (const auto& n : both) EXPECT_TRUE(seen.insert(n.edge).second);
  }
}

TEST(GraphStore, AttributeLookups) {
  const GraphStore& s = demo();
  EXPECT_EQ(s.vertices_by_attr("VoltageLevel", "kv", {Comparator::Eq, std::int64_t{220}, {}}),
            std::vector<std::string>{"V220"});
  EXPECT_TRUE(s.vertices_by_attr("Transformer", "commission_date", {Comparator::Ge, make_date(2019, 1, 1), {}}).empty());
  EXPECT_EQ(s.vertices_by_attr("DefectRecord", "defect_type", {Comparator::Eq, std::string("oil leakage"), {}}),
            std::vector<std::string>{"D1"});
  try {
    s.vertices_by_attr("Transformer", "height", {Comparator::Eq, std::int64_t{1}, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAttribute);
  }
  try {
    s.vertices_by_attr("VoltageLevel", "kv", {Comparator::Eq, std::string("220"), {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TypeMismatch);
  }
}

// Index lookups agree with a full scan through the oracle predicate.
class RandomStores : public ::testing::TestWithParam<int> {};

TEST_P(RandomStores, IndexEqualsScan) {
  oracle::Rng rng(GetParam());
  auto schema = std::make_shared<const OntologySchema>(oracle::random_schema(rng, 2 + rng() % 8, rng() % 4));
  GraphStore store = oracle::random_store(schema, rng, 50 + rng() % 800, 20 + rng() % 200);
  oracle::QuestionShape shape;
  shape.allow_edges = false;
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    ParsedQuestion q = oracle::random_question(rng, store, shape);
    for (const auto& c : q.constraints) {
      if (c.kind != ConstraintKind::Attribute) continue;
      Predicate p;
      Value literal = c.value;
      switch (c.cmp) {
        case Comparison::Eq: p.op = Comparator::Eq; break;
        case Comparison::Neq: p.op = Comparator::Neq; break;
        case Comparison::Lt: p.op = Comparator::Lt; break;
        case Comparison::Le: p.op = Comparator::Le; break;
        case Comparison::Gt: p.op = Comparator::Gt; break;
        case Comparison::Ge: p.op = Comparator::Ge; break;
        case Comparison::Contains: p.op = Comparator::Contains; break;
        default: continue;  // ranges are covered through the query oracle
      }
      p.value = literal;
      std::vector<std::string> scan;
      for (const auto& v : store.vertices())
        if (v.cls == c.cls && oracle::holds(store.schema(), c, v, make_date(2024, 12, 31))) scan.push_back(v.id);
      std::sort(scan.begin(), scan.end());
      EXPECT_EQ(store.vertices_by_attr(c.cls, c.attribute, p), scan) << c.describe();
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST_P(RandomStores, AdjacencyClosure) {
  oracle::Rng rng(GetParam());
  auto schema = std::make_shared<const OntologySchema>(oracle::random_schema(rng, 2 + rng() % 8, rng() % 4));
  GraphStore store = oracle::random_store(schema, rng, 50 + rng() % 500, rng() % 300);
  std::size_t out = 0, in = 0;
  for (VertexIndex v = 0; v < store.vertex_count(); ++v) {
    out += store.out_edges(v).size();
    in += store.in_edges(v).size();
    for (const auto& a : store.out_edges(v)) EXPECT_EQ(store.edge(a.edge).src, store.vertex(v).id);
    for (const auto& a : store.in_edges(v)) EXPECT_EQ(store.edge(a.edge).dst, store.vertex(v).id);
  }
  EXPECT_EQ(out, store.edge_count());
  EXPECT_EQ(in, store.edge_count());
  // Class index: ascending, complete.
  for (const auto& c : store.schema().classes()) {
    oracle::Evaluator eval(store);
    std::vector<std::string> ids;
    for (VertexIndex v : store.class_members(c.name)) ids.push_back(store.vertex(v).id);
    EXPECT_EQ(ids, eval.scan(c.name));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomStores, ::testing::Range(1, 21));

}  // namespace
}  // namespace gridqa
