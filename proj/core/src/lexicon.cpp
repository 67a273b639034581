#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "gridqa/error.hpp"
#include "gridqa/nlq.hpp"

namespace gridqa {

using nlohmann::json;

namespace {

constexpr std::string_view kTagKinds[] = {"class", "instance", "attribute",    "edge",
                                          "value", "time",     "logic",        "question_word"};
constexpr std::string_view kBindingKinds[] = {"class",    "instance", "attribute", "edge",
                                              "value",    "operator", "question",  "literal"};
const std::set<std::string, std::less<>> kOperators = {
    "and", "or", "not", "within", "before", "after", "since",
    "gt",  "lt", "ge",  "le",     "neq",    "contains"};
const std::set<std::string, std::less<>> kQuestions = {"which", "what", "who", "count", "list"};

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::ValidationError, "lexicon: " + message);
}

[[noreturn]] void malformed(const std::string& message) {
  throw Error(ErrorCode::ParseError, "lexicon: " + message);
}

std::optional<BindingKind> binding_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kBindingKinds); ++i)
    if (kBindingKinds[i] == name) return static_cast<BindingKind>(i);
  return std::nullopt;
}

std::string phrase_key(std::string_view text) {
  std::string out;
  for (const auto& t : tokenize(text)) {
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

std::pair<std::string, std::string> split_attribute(const std::string& ref) {
  auto dot = ref.find('.');
  if (dot == std::string::npos) return {ref, ""};
  return {ref.substr(0, dot), ref.substr(dot + 1)};
}

bool kinds_compatible(BindingKind b, TagKind t) {
  switch (b) {
    case BindingKind::Class: return t == TagKind::Class;
    case BindingKind::Instance: return t == TagKind::Instance;
    case BindingKind::Attribute: return t == TagKind::Attribute;
    case BindingKind::Edge: return t == TagKind::Edge;
    case BindingKind::Value: return t == TagKind::Value;
    case BindingKind::Operator: return t == TagKind::Logic || t == TagKind::Time;
    case BindingKind::Question: return t == TagKind::QuestionWord;
    case BindingKind::Literal: return false;
  }
  return false;
}

void resolve(LexiconEntry& e, const OntologySchema& schema, const GraphStore* store) {
  const std::string& ref = e.binds_to.ref;
  const std::string where = "entry '" + e.surface + "'";
  switch (e.binds_to.kind) {
    case BindingKind::Class:
      if (!schema.find_class(ref)) invalid(where + ": unknown class '" + ref + "'");
      break;
    case BindingKind::Instance:
      if (!store) invalid(where + ": instance entries need a graph store");
      if (!store->find_vertex(ref)) invalid(where + ": unknown vertex '" + ref + "'");
      break;
    case BindingKind::Attribute:
    case BindingKind::Value: {
      auto [cls, attr] = split_attribute(ref);
      const AttributeDef* def = schema.find_attribute(cls, attr);
      if (!def) invalid(where + ": unknown attribute '" + ref + "'");
      if (e.binds_to.kind == BindingKind::Value) {
        Value literal = e.binds_to.literal.value_or(Value{e.surface});
        auto typed = coerce(literal, def->datatype);
        if (!typed) invalid(where + ": value does not match " + ref);
        e.binds_to.literal = std::move(*typed);
      }
      break;
    }
    case BindingKind::Edge:
      if (schema.find_edge_types(ref).empty()) invalid(where + ": unknown edge type '" + ref + "'");
      break;
    case BindingKind::Operator:
      if (!kOperators.count(ref)) invalid(where + ": unknown operator '" + ref + "'");
      break;
    case BindingKind::Question:
      if (!kQuestions.count(ref)) invalid(where + ": unknown question word '" + ref + "'");
      break;
    case BindingKind::Literal:
      invalid(where + ": literal bindings are reserved for built-in recognizers");
  }
}

}  // namespace

std::string_view to_string(TagKind kind) { return kTagKinds[static_cast<std::size_t>(kind)]; }

std::optional<TagKind> tag_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kTagKinds); ++i)
    if (kTagKinds[i] == name) return static_cast<TagKind>(i);
  return std::nullopt;
}

std::string_view to_string(BindingKind kind) {
  return kBindingKinds[static_cast<std::size_t>(kind)];
}

Lexicon Lexicon::build(std::vector<LexiconEntry> entries, const OntologySchema& schema,
                       const GraphStore* store) {
  std::set<std::string> seen;
  for (auto& e : entries) {
    e.surface = phrase_key(e.surface);
    if (e.surface.empty()) invalid("entry with an empty surface form");
    if (!kinds_compatible(e.binds_to.kind, e.tag_kind))
      invalid("entry '" + e.surface + "': tag kind " + std::string(to_string(e.tag_kind)) +
              " does not fit a " + std::string(to_string(e.binds_to.kind)) + " binding");
    for (auto& v : e.variants) {
      v = phrase_key(v);
      if (v.empty()) invalid("entry '" + e.surface + "' has an empty variant");
    }
    resolve(e, schema, store);
    if (!seen.insert(e.surface).second) invalid("phrase '" + e.surface + "' is defined twice");
    for (const auto& v : e.variants)
      if (v != e.surface && !seen.insert(v).second)
        invalid("phrase '" + v + "' is defined twice");
  }
  Lexicon lex;
  lex.entries_ = std::move(entries);
  return lex;
}

Lexicon Lexicon::load(std::string_view json_text, const OntologySchema& schema,
                      const GraphStore* store) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    malformed(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) malformed("document must be a JSON array");
  std::vector<LexiconEntry> entries;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    std::string where = "entry " + std::to_string(i);
    if (!item.is_object()) malformed(where + " must be an object");
    LexiconEntry e;
    auto surface = item.find("surface");
    if (surface == item.end() || !surface->is_string()) malformed(where + ": surface must be a string");
    e.surface = surface->get<std::string>();
    if (auto v = item.find("variants"); v != item.end()) {
      if (!v->is_array()) malformed(where + ": variants must be an array");
      for (const auto& s : *v) {
        if (!s.is_string()) malformed(where + ": variants must be strings");
        e.variants.push_back(s.get<std::string>());
      }
    }
    auto tk = item.find("tag_kind");
    if (tk == item.end() || !tk->is_string()) malformed(where + ": tag_kind must be a string");
    auto tag_kind = tag_kind_from_string(tk->get<std::string>());
    if (!tag_kind) invalid(where + ": unknown tag_kind '" + tk->get<std::string>() + "'");
    e.tag_kind = *tag_kind;
    auto b = item.find("binds_to");
    if (b == item.end() || !b->is_object()) malformed(where + ": binds_to must be an object");
    auto kind = b->find("kind");
    auto ref = b->find("ref");
    if (kind == b->end() || !kind->is_string() || ref == b->end() || !ref->is_string())
      malformed(where + ": binds_to needs string kind and ref");
    auto bk = binding_kind_from_string(kind->get<std::string>());
    if (!bk) invalid(where + ": unknown binding kind '" + kind->get<std::string>() + "'");
    e.binds_to.kind = *bk;
    e.binds_to.ref = ref->get<std::string>();
    if (auto v = b->find("value"); v != b->end()) {
      if (v->is_string()) e.binds_to.literal = Value{v->get<std::string>()};
      else if (v->is_number_integer()) e.binds_to.literal = Value{v->get<std::int64_t>()};
      else if (v->is_number()) e.binds_to.literal = Value{v->get<double>()};
      else if (v->is_boolean()) e.binds_to.literal = Value{v->get<bool>()};
      else malformed(where + ": unsupported value literal");
    }
    entries.push_back(std::move(e));
  }
  return build(std::move(entries), schema, store);
}

Lexicon Lexicon::load_file(const std::filesystem::path& path, const OntologySchema& schema,
                           const GraphStore* store) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open lexicon file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load(buf.str(), schema, store);
}

json Lexicon::to_json() const {
  json out = json::array();
  for (const auto& e : entries_) {
    json binds{{"kind", to_string(e.binds_to.kind)}, {"ref", e.binds_to.ref}};
    if (e.binds_to.literal && e.binds_to.kind == BindingKind::Value)
      binds["value"] = value_to_json(*e.binds_to.literal);
    json item{{"surface", e.surface}, {"binds_to", binds}, {"tag_kind", to_string(e.tag_kind)}};
    if (!e.variants.empty()) item["variants"] = e.variants;
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace gridqa
