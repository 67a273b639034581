#include <gtest/gtest.h>

#include <random>
#include <set>

#include "gridqa/error.hpp"
#include "gridqa/nlq.hpp"
#include "support.hpp"

namespace gridqa {
namespace {

const Engine& engine() { return testing::seed42_engine(); }

ErrorCode analyze_error(const std::string& q, std::optional<std::string> deps = {}) {
  try {
    engine().analyze(q, deps);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "analyzed: " << q;
  return ErrorCode::IoError;
}

struct TagView {
  std::string surface;
  TagKind kind;
  BindingKind binding;
  std::string ref;
  bool operator==(const TagView&) const = default;
};

std::vector<TagView> view(const TaggedQuestion& t) {
  std::vector<TagView> out;
  for (const auto& g : t.tags) out.push_back({g.surface, g.kind, g.binding.kind, g.binding.ref});
  return out;
}

TEST(Tagger, GoldenQuestionTags) {
  auto t = engine().tagger().tag(testing::golden_question());
  std::vector<TagView> want{
      {"which", TagKind::QuestionWord, BindingKind::Question, "which"},
      {"transformers", TagKind::Class, BindingKind::Class, "Transformer"},
      {"california power grid", TagKind::Instance, BindingKind::Instance, "U1"},
      {"oil leakage", TagKind::Value, BindingKind::Value, "DefectRecord.defect_type"},
      {"within", TagKind::Time, BindingKind::Operator, "within"},
      {"five years", TagKind::Time, BindingKind::Literal, "duration"},
      {"operation", TagKind::Attribute, BindingKind::Attribute, "Transformer.commission_date"},
      {"2019", TagKind::Time, BindingKind::Literal, "year"},
  };
  EXPECT_EQ(view(t), want);
  // Connectives and filler words stay untagged.
  for (std::size_t i : {2u, 3u, 7u, 13u, 15u}) EXPECT_FALSE(t.tag_at(i)) << t.tokens[i].text;
}

TEST(Tagger, SingleClassWord) {
  auto t = engine().tagger().tag("transformers");
  ASSERT_EQ(t.tags.size(), 1u);
  EXPECT_EQ(t.tags[0].binding.ref, "Transformer");
}

TEST(Tagger, VariantResolvesToInstance) {
  const GraphStore& store = engine().store();
  LexiconEntry e;
  e.surface = "state grid corp";
  e.variants = {"sgcc"};
  e.binds_to = {BindingKind::Instance, "U2", std::nullopt};
  e.tag_kind = TagKind::Instance;
  Lexicon lex = Lexicon::build({e}, store.schema(), &store);
  Tagger tagger(store.schema(), store, lex);
  auto t = tagger.tag("Which SGCC substations have defects?");
  auto i = t.tag_at(1);
  ASSERT_TRUE(i);
  EXPECT_EQ(t.tags[*i].kind, TagKind::Instance);
  EXPECT_EQ(t.tags[*i].binding.ref, "U2");
}

TEST(Tagger, InstanceEntryMustNameAVertex) {
  const GraphStore& store = engine().store();
  LexiconEntry e;
  e.surface = "nowhere grid";
  e.binds_to = {BindingKind::Instance, "U999", std::nullopt};
  e.tag_kind = TagKind::Instance;
  EXPECT_THROW(Lexicon::build({e}, store.schema(), &store), Error);
}

TEST(Tagger, LongestMatchWins) {
  auto t = engine().tagger().tag("Which voltage levels have transformers?");
  ASSERT_GE(t.tags.size(), 2u);
  EXPECT_EQ(t.tags[1].surface, "voltage levels");
  EXPECT_EQ(t.tags[1].end - t.tags[1].begin, 2u);
}

TEST(Tagger, EmptyQuestion) {
  EXPECT_THROW(engine().tagger().tag("   ?! "), Error);
  EXPECT_EQ(analyze_error(""), ErrorCode::EmptyQuestion);
}

TEST(Tokenizer, NormalizesAndKeepsQuotes) {
  auto t = tokenize("Which \"Acme Electric\" transformers, rated 180.5?");
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t[1].text, "Acme Electric");
  EXPECT_TRUE(t[1].quoted);
  EXPECT_EQ(t[2].text, "transformers");
  EXPECT_EQ(t[4].text, "180.5");
}

TEST(Dependencies, GoldenTreeShape) {
  auto t = engine().tagger().tag(testing::golden_question());
  auto tree = parse_dependencies(t);
  EXPECT_EQ(tree.tokens()[tree.root()].text, "have");
  EXPECT_EQ(tree.head(1), tree.root());
  EXPECT_EQ(tree.label(1), "nsubj");
  EXPECT_EQ(tree.head(9), tree.root());  // "leakage"
  EXPECT_EQ(tree.label(9), "obj");
}

TEST(Dependencies, ImperativeShape) {
  auto tree = parse_dependencies(engine().tagger().tag("list transformers"));
  EXPECT_EQ(tree.tokens()[tree.root()].text, "list");
  EXPECT_EQ(tree.head(1), tree.root());
  EXPECT_EQ(tree.label(1), "obj");
}

TEST(Dependencies, ConlluRoundTrip) {
  auto tagged = engine().tagger().tag(testing::golden_question());
  auto tree = parse_dependencies(tagged);
  EXPECT_EQ(parse_conllu(tree.to_conllu(), tagged.tokens), tree);
  auto fixture = parse_conllu(testing::read_text(testing::fixtures_dir() / "golden_parse.conllu"), tagged.tokens);
  EXPECT_EQ(fixture.tokens()[fixture.root()].text, "have");
  EXPECT_EQ(fixture.label(1), "nsubj");
}

TEST(Dependencies, ConlluIsValidated) {
  auto tokens = tokenize("list transformers");
  EXPECT_THROW(parse_conllu("1\tlist\tVB\t0\troot\n2\tsubstations\tNN\t1\tobj\n", tokens), Error);
  EXPECT_THROW(parse_conllu("1\tlist\tVB\t2\tdep\n2\ttransformers\tNN\t1\tobj\n", tokens), Error);
  EXPECT_THROW(parse_conllu("1\tlist\tVB\t0\troot\n2\ttransformers\tNN\t0\troot\n", tokens), Error);
  EXPECT_THROW(parse_conllu("1\tlist\tVB\t0\troot\n", tokens), Error);
  EXPECT_NO_THROW(parse_conllu("# c\n1\tlist\tVB\t0\troot\n2\ttransformers\tNNS\t1\tobj\n\n", tokens));
}

TEST(Extraction, GoldenTargetAndConstraints) {
  for (int provider = 0; provider < 2; ++provider) {
    std::optional<std::string> deps;
    if (provider) deps = testing::read_text(testing::fixtures_dir() / "golden_parse.conllu");
    auto a = engine().analyze(testing::golden_question(), deps);
    ASSERT_TRUE(a.parsed.target);
    EXPECT_EQ(a.parsed.target->cls, "Transformer");
    EXPECT_EQ(a.parsed.target->type, QuestionType::Selection);
    const auto& c = a.parsed.constraints;
    ASSERT_EQ(c.size(), 4u);
    EXPECT_EQ(c[0].kind, ConstraintKind::Instance);
    EXPECT_EQ(c[0].vertex, "U1");
    EXPECT_EQ(c[1].attribute, "defect_type");
    EXPECT_EQ(c[1].value, Value{std::string("oil leakage")});
    EXPECT_EQ(c[2].attribute, "commission_date");
    EXPECT_EQ(c[2].cmp, Comparison::WithinDuration);
    EXPECT_EQ(c[2].value, (Value{Duration{5, Duration::Unit::Year}}));
    EXPECT_EQ(c[3].attribute, "found_date");
    EXPECT_EQ(c[3].cmp, Comparison::InYear);
    EXPECT_EQ(c[3].value, Value{std::int64_t{2019}});
    for (const auto& x : c) EXPECT_EQ(x.connector, Connector::And);
  }
}

TEST(Extraction, ParentChildTarget) {
  auto a = engine().analyze("Which manufacturers made 220kV transformers with oil leakage?");
  ASSERT_TRUE(a.parsed.target);
  EXPECT_EQ(a.parsed.target->cls, "Manufacturer");
  ASSERT_EQ(a.parsed.constraints.size(), 3u);
  EXPECT_EQ(a.parsed.constraints[0].attribute, "kv");
  EXPECT_EQ(a.parsed.constraints[1].kind, ConstraintKind::Class);
  EXPECT_EQ(a.parsed.constraints[1].cls, "Transformer");
  EXPECT_EQ(a.parsed.constraints[2].attribute, "defect_type");
}

TEST(Extraction, BrothersTarget) {
  auto a = engine().analyze("list transformers");
  ASSERT_TRUE(a.parsed.target);
  EXPECT_EQ(a.parsed.target->cls, "Transformer");
  EXPECT_EQ(a.parsed.target->type, QuestionType::List);
  EXPECT_TRUE(a.parsed.constraints.empty());
}

TEST(Extraction, NoPatternNoTarget) {
  EXPECT_EQ(analyze_error("transformers made by Acme Electric"), ErrorCode::NoTargetFound);
  EXPECT_EQ(analyze_error("Which breakers were made by Acme Electric?"), ErrorCode::NoTargetFound);
}

TEST(Extraction, NegatedEdge) {
  auto a = engine().analyze("Which transformers have no defects?");
  ASSERT_EQ(a.parsed.constraints.size(), 1u);
  EXPECT_EQ(a.parsed.constraints[0].kind, ConstraintKind::Edge);
  EXPECT_EQ(a.parsed.constraints[0].edge, "hasDefect");
  EXPECT_EQ(a.parsed.constraints[0].connector, Connector::Not);
  auto b = engine().analyze("Which transformers without defects?");
  ASSERT_EQ(b.parsed.constraints.size(), 1u);
  EXPECT_EQ(b.parsed.constraints[0].connector, Connector::Not);
}

TEST(Extraction, ConstraintJsonRoundTrip) {
  auto a = engine().analyze(testing::golden_question());
  for (const auto& c : a.parsed.constraints) {
    Constraint back = constraint_from_json(to_json(c));
    EXPECT_EQ(back, c);
    EXPECT_EQ(back.merge_key(), c.merge_key());
  }
}

// Properties over the corpus questions.

TEST(NlqProperties, TaggingIsDeterministicAndPartitions) {
  for (const auto& c : testing::seed42().cases) {
    auto a = engine().tagger().tag(c.question);
    auto b = engine().tagger().tag(c.question);
    EXPECT_EQ(a.tags, b.tags);
    std::size_t last_end = 0;
    for (const auto& t : a.tags) {
      EXPECT_LE(last_end, t.begin) << c.question;
      EXPECT_LT(t.begin, t.end);
      EXPECT_LE(t.end, a.tokens.size());
      last_end = t.end;
    }
    for (std::size_t i = 0; i < a.tokens.size(); ++i) {
      auto k = a.tag_at(i);
      if (k) EXPECT_TRUE(a.tags[*k].begin <= i && i < a.tags[*k].end);
    }
  }
}

TEST(NlqProperties, TargetIsExclusiveAndMatchesExpectedClass) {
  const GraphStore& store = engine().store();
  for (const auto& c : testing::seed42().cases) {
    if (c.follow_up()) continue;
    auto a = engine().analyze(c.question, c.deps);
    ASSERT_TRUE(a.parsed.target) << c.question;
    const EntityTag& t = a.tagged.tags[a.parsed.target->tag];
    for (const auto& x : a.parsed.constraints) EXPECT_NE(x.position, t.begin) << c.question;
    if (c.expected)
      for (const auto& id : *c.expected) EXPECT_EQ(store.vertex(id).cls, a.parsed.target->cls) << c.question;
  }
}

// Random word salads: every input yields a target or a typed error.
TEST(NlqProperties, FailureIsTotal) {
  std::vector<std::string> words{"which", "what", "how many", "list", "transformers", "substations", "made",
                                 "by", "acme electric", "with", "oil leakage", "within", "five years", "of",
                                 "operation", "in", "2019", "not", "or", "and", "220kv", "above", "100",
                                 "the", "california power grid", "have", "defects", "before", "2015-01-01",
                                 "capacity", "region", "north valley", "zebra", "?"};
  std::mt19937_64 rng(11);
  int answered = 0, typed = 0;
  for (int i = 0; i < 400; ++i) {
    std::string q;
    std::size_t n = 1 + rng() % 9;
    for (std::size_t k = 0; k < n; ++k) q += words[rng() % words.size()] + " ";
    try {
      auto a = engine().analyze(q);
      EXPECT_TRUE(a.parsed.target) << q;
      ++answered;
    } catch (const Error&) {
      ++typed;
    }
  }
  EXPECT_EQ(answered + typed, 400);
  EXPECT_GT(answered, 0);
}

}  // namespace
}  // namespace gridqa
