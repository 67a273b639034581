#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>

#include "gridqa/corpus.hpp"
#include "gridqa/error.hpp"
#include "support.hpp"

namespace gridqa {
namespace {

namespace fs = std::filesystem;

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("gridqa-corpus-" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
};

TEST(Generate, IsDeterministicPerSeed) {
  GenerateOptions small;
  small.vertices = 800;
  small.cases = 12;
  GeneratedData a = generate(small), b = generate(small);
  EXPECT_EQ(a.vertices, b.vertices);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.lexicon, b.lexicon);
  EXPECT_EQ(corpus_to_json(a.cases), corpus_to_json(b.cases));
  small.seed = 7;
  EXPECT_NE(generate(small).edges, a.edges);
}

TEST(Generate, DefaultGraphHasExactlyTheRequestedVertices) {
  const GeneratedData& d = testing::seed42();
  EXPECT_EQ(lines(d.vertices), 10000u);
  EXPECT_EQ(testing::seed42_engine().store().vertex_count(), 10000u);
  EXPECT_EQ(d.cases.size(), 50u);
}

TEST(Generate, ZeroVerticesGivesLoadableEmptyFiles) {
  GenerateOptions none;
  none.vertices = 0;
  none.cases = 0;
  GeneratedData d = generate(none);
  EXPECT_EQ(lines(d.vertices), 0u);
  EXPECT_EQ(lines(d.edges), 0u);
  EXPECT_TRUE(d.cases.empty());
  EXPECT_NO_THROW(OntologySchema::load(d.schema));
}

TEST(Generate, WrittenFilesRoundTrip) {
  TempDir tmp;
  GenerateOptions small;
  small.vertices = 600;
  small.cases = 10;
  GeneratedData d = generate(small);
  write_generated(d, tmp.path);
  for (const char* f : {"schema.json", "vertices.jsonl", "edges.jsonl", "lexicon.json", "corpus.json"})
    EXPECT_TRUE(fs::exists(tmp.path / f)) << f;
  EXPECT_EQ(testing::read_text(tmp.path / "vertices.jsonl"), d.vertices);
  EXPECT_EQ(corpus_to_json(load_corpus(tmp.path / "corpus.json")), corpus_to_json(d.cases));
  Engine e = Engine::open(tmp.path);
  EXPECT_EQ(e.store().vertex_count(), 600u);
}

TEST(Generate, CaseJsonRoundTrips) {
  for (const auto& c : testing::seed42().cases) EXPECT_EQ(EvalCase::from_json(c.to_json()).to_json(), c.to_json());
}

TEST(Evaluate, EmptyCaseListGivesEmptyReport) {
  EvalReport r = evaluate(testing::demo_engine(), {});
  EXPECT_TRUE(r.cases.empty());
  EXPECT_EQ(r.total.quantity, 0u);
  EXPECT_EQ(r.total.accepted_rate(), 0.0);
  EXPECT_EQ(r.total.average_ms(), 0.0);
  EXPECT_FALSE(r.table().empty());
}

TEST(Evaluate, OutOfLexiconQuestionIsOneParsingError) {
  EvalCase c;
  c.id = "oov";
  c.question = "Which zebras graze quietly?";
  c.expected = std::vector<std::string>{};
  EvalReport r = evaluate(testing::demo_engine(), {c}, {1, 1});
  ASSERT_EQ(r.cases.size(), 1u);
  EXPECT_EQ(r.cases[0].outcome, Outcome::ParsingError);
  EXPECT_EQ(r.total.parsing_errors, 1u);
  EXPECT_EQ(r.total.accepted, 0u);
  EXPECT_EQ(r.single_hop.parsing_errors + r.multi_hop.parsing_errors, 1u);
}

TEST(Evaluate, ExpectedErrorCountsAsAccepted) {
  EvalCase c;
  c.id = "err";
  c.question = "transformers made by Acme Electric";
  c.expected_error = "NoTargetFound";
  EvalReport r = evaluate(testing::demo_engine(), {c}, {1, 1});
  EXPECT_EQ(r.cases[0].outcome, Outcome::Accepted) << r.cases[0].message;
}

TEST(Evaluate, WrongExpectationIsRejected) {
  EvalCase c;
  c.id = "wrong";
  c.question = "Which manufacturers made 220kV transformers with oil leakage?";
  c.multi_hop = true;
  c.multi_condition = true;
  c.expected = std::vector<std::string>{"M2"};
  EvalReport r = evaluate(testing::demo_engine(), {c}, {1, 1});
  EXPECT_EQ(r.cases[0].outcome, Outcome::WrongAnswer);
  EXPECT_EQ(r.total.other, 1u);
  c.expected = std::vector<std::string>{"M1"};
  c.multi_condition = false;
  EXPECT_EQ(evaluate(testing::demo_engine(), {c}, {1, 1}).cases[0].outcome, Outcome::LabelMismatch);
}

// Rows add up, categories partition the cases and labels match the plans.
TEST(Evaluate, SeedCorpusReportIsConsistent) {
  EvalReport r = evaluate(testing::seed42_engine(), testing::seed42().cases, {2, 1});
  ASSERT_EQ(r.cases.size(), 50u);
  for (const CategoryRow* row : {&r.single_hop, &r.multi_hop, &r.single_condition, &r.multi_condition, &r.total})
    EXPECT_EQ(row->quantity, row->parsing_errors + row->reasoning_errors + row->accepted + row->other);
  EXPECT_EQ(r.single_hop.quantity + r.multi_hop.quantity, r.total.quantity);
  EXPECT_EQ(r.single_condition.quantity + r.multi_condition.quantity, r.total.quantity);
  EXPECT_NEAR(r.total.total_ms, r.single_hop.total_ms + r.multi_hop.total_ms, 1e-9);
  for (const auto& c : r.cases) {
    EXPECT_EQ(c.outcome, Outcome::Accepted) << c.id << ": " << c.message;
    if (c.measured_hops) EXPECT_EQ(*c.measured_hops > 1, c.multi_hop) << c.id;
    if (c.measured_conditions) EXPECT_EQ(*c.measured_conditions > 1, c.multi_condition) << c.id;
  }
  auto j = r.to_json();
  EXPECT_TRUE(j.is_object());
}

}  // namespace
}  // namespace gridqa
