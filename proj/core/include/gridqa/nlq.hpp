#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridqa/graph_store.hpp"
#include "gridqa/schema.hpp"
#include "gridqa/value.hpp"

namespace gridqa {

// ---------------------------------------------------------------------------
// Lexicon

enum class TagKind { Class, Instance, Attribute, Edge, Value, Time, Logic, QuestionWord };

std::string_view to_string(TagKind kind);
std::optional<TagKind> tag_kind_from_string(std::string_view name);

/// What a surface form stands for.
///   class      ref = class name
///   instance   ref = vertex id
///   attribute  ref = "Class.attr"
///   edge       ref = edge type name
///   value      ref = "Class.attr", literal = typed value
///   operator   ref = and|or|not|within|before|after|since|gt|lt|ge|le|neq|contains
///   question   ref = which|what|who|count|list
///   literal    ref = year|duration|date|number|string (built-in recognizers only)
enum class BindingKind { Class, Instance, Attribute, Edge, Value, Operator, Question, Literal };

std::string_view to_string(BindingKind kind);

struct Binding {
  BindingKind kind = BindingKind::Class;
  std::string ref;
  std::optional<Value> literal;

  bool operator==(const Binding&) const = default;
};

struct LexiconEntry {
  std::string surface;
  std::vector<std::string> variants;
  Binding binds_to;
  TagKind tag_kind = TagKind::Class;
};

/// Validated surface-form dictionary. Every phrase (surface or variant) maps
/// to exactly one entry; instance entries must name vertices in the store.
class Lexicon {
 public:
  static Lexicon load(std::string_view json_text, const OntologySchema& schema,
                      const GraphStore* store);
  static Lexicon load_file(const std::filesystem::path& path, const OntologySchema& schema,
                           const GraphStore* store);
  static Lexicon build(std::vector<LexiconEntry> entries, const OntologySchema& schema,
                       const GraphStore* store);

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  nlohmann::json to_json() const;

 private:
  std::vector<LexiconEntry> entries_;
};

// ---------------------------------------------------------------------------
// Tokens and tags

struct Token {
  std::string text;  // lowercase, or verbatim contents for quoted literals
  bool quoted = false;

  bool operator==(const Token&) const = default;
};

/// Lowercases, splits on whitespace, strips leading/trailing punctuation
/// (internal '-' and '.' survive) and keeps quoted phrases as single tokens.
std::vector<Token> tokenize(std::string_view question);

/// Normalizes one word the same way tokenize does.
std::string normalize_word(std::string_view word);

enum class TagSource { Lexicon, Gazetteer, Builtin };

struct EntityTag {
  std::size_t begin = 0;  // token range [begin, end)
  std::size_t end = 0;
  std::string surface;
  TagKind kind = TagKind::Class;
  Binding binding;
  TagSource source = TagSource::Lexicon;

  bool operator==(const EntityTag&) const = default;
};

struct TaggedQuestion {
  std::string raw;
  std::vector<Token> tokens;
  std::vector<EntityTag> tags;  // ordered by begin, non-overlapping

  /// Index into `tags` covering token i.
  std::optional<std::size_t> tag_at(std::size_t token) const;
};

/// Longest-match, left-to-right tagger over lexicon entries, a gazetteer of
/// vertex names, and built-in literal recognizers. Immutable after build.
class Tagger {
 public:
  Tagger(const OntologySchema& schema, const GraphStore& store, const Lexicon& lexicon);

  /// Throws EmptyQuestion when the question has no tokens.
  TaggedQuestion tag(std::string_view question) const;

  std::size_t gazetteer_size() const { return gazetteer_size_; }

 private:
  struct Phrase {
    Binding binding;
    TagKind kind;
    TagSource source;
  };

  std::optional<std::pair<std::size_t, EntityTag>> builtin_at(const std::vector<Token>& tokens,
                                                              std::size_t i) const;

  const OntologySchema* schema_;
  std::map<std::vector<std::string>, Phrase> phrases_;
  std::size_t longest_ = 0;
  std::size_t gazetteer_size_ = 0;
};

TaggedQuestion tag_entities(const OntologySchema& schema, const GraphStore& store,
                            const Lexicon& lexicon, std::string_view question);

// ---------------------------------------------------------------------------
// Dependency trees

struct DepToken {
  std::string text;
  std::string pos;
};

struct DepRelation {
  std::size_t head = 0;
  std::size_t dependent = 0;
  std::string label;
};

/// Rooted dependency tree over question tokens. The constructor enforces a
/// single root and acyclicity and throws UnparseableInput otherwise.
class DependencyTree {
 public:
  DependencyTree(std::vector<DepToken> tokens, std::vector<std::optional<std::size_t>> heads,
                 std::vector<std::string> labels);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<DepToken>& tokens() const { return tokens_; }
  std::size_t root() const { return root_; }
  std::optional<std::size_t> head(std::size_t i) const { return heads_[i]; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  std::vector<std::size_t> children(std::size_t i) const;
  std::vector<DepRelation> relations() const;
  std::size_t depth(std::size_t i) const { return depth_[i]; }
  /// Edge count of the tree path between two tokens.
  std::size_t distance(std::size_t a, std::size_t b) const;

  std::string to_conllu() const;
  bool operator==(const DependencyTree& other) const;

 private:
  std::vector<DepToken> tokens_;
  std::vector<std::optional<std::size_t>> heads_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> depth_;
  std::size_t root_ = 0;
};

/// Reads a CoNLL-U-style tree (index, form, POS, head, relation; tab
/// separated; '#' comments; blank line ends the sentence). Forms must match
/// `expected` after normalization, else UnparseableInput.
DependencyTree parse_conllu(std::string_view text, const std::vector<Token>& expected);

/// Built-in rule parser: word-list POS, noun-phrase chunking over tag spans,
/// and verb/preposition attachment heuristics.
DependencyTree parse_dependencies(const TaggedQuestion& tagged);

// ---------------------------------------------------------------------------
// Parsed questions

enum class QuestionType { Selection, Count, List };

std::string_view to_string(QuestionType type);

struct Target {
  std::string cls;
  std::optional<std::string> attribute;
  QuestionType type = QuestionType::Selection;
  std::size_t tag = 0;  // index into TaggedQuestion::tags

  bool operator==(const Target& other) const {
    return cls == other.cls && attribute == other.attribute && type == other.type;
  }
};

enum class ConstraintKind { Class, Instance, Attribute, Edge };
enum class Comparison { Eq, Neq, Lt, Le, Gt, Ge, WithinDuration, InYear, Contains };
enum class Connector { And, Or, Not };

std::string_view to_string(ConstraintKind kind);
std::string_view to_string(Comparison cmp);
std::string_view to_string(Connector connector);
std::optional<Comparison> comparison_from_string(std::string_view name);

struct Constraint {
  ConstraintKind kind = ConstraintKind::Class;
  std::string cls;        // anchor class; empty for edge constraints
  std::string attribute;  // Attribute
  std::string edge;       // Edge
  std::string vertex;     // Instance
  Comparison cmp = Comparison::Eq;
  Value value;
  Connector connector = Connector::And;
  std::size_t position = 0;
  std::string surface;

  /// Identity used when merging follow-up turns: same anchor, attribute and
  /// comparator.
  std::string merge_key() const;
  std::string describe() const;
  bool operator==(const Constraint& other) const;
};

struct ParsedQuestion {
  std::string raw;
  std::optional<Target> target;
  std::vector<Constraint> constraints;

  nlohmann::json to_json() const;
};

nlohmann::json to_json(const Constraint& constraint);
Constraint constraint_from_json(const nlohmann::json& j);

/// Parent-child pattern first (question word under a tagged noun), then the
/// brothers pattern (question word or imperative at the root with a tagged
/// noun sibling). Throws NoTargetFound.
Target extract_target(const DependencyTree& tree, const TaggedQuestion& tagged,
                      const OntologySchema& schema);

/// Throws DanglingQualifier when a time/logic qualifier has nowhere to attach.
std::vector<Constraint> extract_constraints(const DependencyTree& tree,
                                            const TaggedQuestion& tagged,
                                            const std::optional<Target>& target,
                                            const OntologySchema& schema,
                                            const GraphStore& store);

}  // namespace gridqa
