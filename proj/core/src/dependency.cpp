#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "gridqa/error.hpp"
#include "gridqa/nlq.hpp"

namespace gridqa {

namespace {

[[noreturn]] void unparseable(const std::string& message) {
  throw Error(ErrorCode::UnparseableInput, message);
}

}  // namespace

DependencyTree::DependencyTree(std::vector<DepToken> tokens,
                               std::vector<std::optional<std::size_t>> heads,
                               std::vector<std::string> labels)
    : tokens_(std::move(tokens)), heads_(std::move(heads)), labels_(std::move(labels)) {
  const std::size_t n = tokens_.size();
  if (n == 0) unparseable("dependency tree has no tokens");
  if (heads_.size() != n || labels_.size() != n) unparseable("dependency tree arity mismatch");
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < n; ++i) {
    if (!heads_[i]) {
      if (root) unparseable("dependency tree has more than one root");
      root = i;
    } else if (*heads_[i] >= n || *heads_[i] == i) {
      unparseable("token " + std::to_string(i + 1) + " has an invalid head");
    }
  }
  if (!root) unparseable("dependency tree has no root");
  root_ = *root;

  depth_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t steps = 0;
    std::size_t cur = i;
    while (heads_[cur]) {
      cur = *heads_[cur];
      if (++steps > n) unparseable("dependency relations contain a cycle");
    }
    depth_[i] = steps;
  }
}

std::vector<std::size_t> DependencyTree::children(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < heads_.size(); ++j)
    if (heads_[j] == i) out.push_back(j);
  return out;
}

std::vector<DepRelation> DependencyTree::relations() const {
  std::vector<DepRelation> out;
  for (std::size_t j = 0; j < heads_.size(); ++j)
    if (heads_[j]) out.push_back({*heads_[j], j, labels_[j]});
  return out;
}

std::size_t DependencyTree::distance(std::size_t a, std::size_t b) const {
  std::size_t steps = 0;
  while (a != b) {
    if (depth_[a] >= depth_[b]) a = *heads_[a];
    else b = *heads_[b];
    ++steps;
  }
  return steps;
}

std::string DependencyTree::to_conllu() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << (i + 1) << '\t' << tokens_[i].text << '\t' << tokens_[i].pos << '\t'
        << (heads_[i] ? *heads_[i] + 1 : 0) << '\t' << labels_[i] << '\n';
  }
  out << '\n';
  return out.str();
}

bool DependencyTree::operator==(const DependencyTree& other) const {
  if (tokens_.size() != other.tokens_.size()) return false;
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (tokens_[i].text != other.tokens_[i].text || tokens_[i].pos != other.tokens_[i].pos)
      return false;
  return heads_ == other.heads_ && labels_ == other.labels_;
}

DependencyTree parse_conllu(std::string_view text, const std::vector<Token>& expected) {
  std::vector<DepToken> tokens;
  std::vector<std::optional<std::size_t>> heads;
  std::vector<std::string> labels;
  std::vector<std::size_t> raw_heads;

  std::istringstream in{std::string(text)};
  std::string line;
  bool started = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      if (started) break;
      continue;
    }
    if (line[0] == '#') continue;
    started = true;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    if (fields.size() < 5) unparseable("dependency line needs 5 tab-separated fields: " + line);
    std::size_t index = 0, head = 0;
    auto num = [&](const std::string& s, std::size_t& out) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      return ec == std::errc{} && p == s.data() + s.size();
    };
    if (!num(fields[0], index) || !num(fields[3], head))
      unparseable("dependency line has a non-numeric index or head: " + line);
    if (index != tokens.size() + 1) unparseable("dependency indices must run 1..n in order");
    tokens.push_back({fields[1], fields[2]});
    raw_heads.push_back(head);
    labels.push_back(fields[4]);
  }

  // Punctuation-only forms are not question tokens.
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (!normalize_word(tokens[i].text).empty()) keep.push_back(i);
  if (keep.size() != expected.size())
    unparseable("dependency override has " + std::to_string(keep.size()) +
                " tokens but the question has " + std::to_string(expected.size()));
  std::vector<std::optional<std::size_t>> remap(tokens.size());
  for (std::size_t k = 0; k < keep.size(); ++k) remap[keep[k]] = k;

  std::vector<DepToken> kept_tokens;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto& t = tokens[keep[k]];
    const Token& want = expected[k];
    std::string form = want.quoted ? t.text : normalize_word(t.text);
    std::string have = want.quoted ? want.text : want.text;
    if (want.quoted) {
      std::string_view f = form;
      while (!f.empty() && (f.front() == '"' || f.front() == '\'')) f.remove_prefix(1);
      while (!f.empty() && (f.back() == '"' || f.back() == '\'')) f.remove_suffix(1);
      form = std::string(f);
    }
    if (form != have)
      unparseable("dependency override token " + std::to_string(k + 1) + " is '" + t.text +
                  "' but the question has '" + want.text + "'");
    kept_tokens.push_back({want.text, t.pos});
    std::size_t h = raw_heads[keep[k]];
    if (h == 0) {
      heads.push_back(std::nullopt);
    } else {
      if (h > tokens.size() || !remap[h - 1])
        unparseable("dependency head of token " + std::to_string(k + 1) + " is not a question token");
      heads.push_back(remap[h - 1]);
    }
  }
  std::vector<std::string> kept_labels;
  for (std::size_t k : keep) kept_labels.push_back(labels[k]);
  return DependencyTree(std::move(kept_tokens), std::move(heads), std::move(kept_labels));
}

// ---------------------------------------------------------------------------
// Rule parser

namespace {

enum class Cat { Noun, Det, Wh, Verb, Prep, Conj, Adv };

const std::set<std::string, std::less<>> kWh = {"which", "what", "who", "whom", "whose", "how"};
const std::set<std::string, std::less<>> kDet = {"the", "a", "an", "any", "all", "its", "their",
                                                 "this", "that", "these", "those", "some",
                                                 "no", "each", "every"};
const std::set<std::string, std::less<>> kPrep = {
    "in", "of", "with", "by", "for", "from", "at", "on", "to", "as", "within", "before",
    "after", "since", "without", "above", "below", "under", "over", "than", "into",
    "containing", "during", "between", "near", "except", "least", "most"};
const std::set<std::string, std::less<>> kConj = {"and", "or", "but", "nor"};
const std::set<std::string, std::less<>> kAdv = {"not", "only", "also", "just", "currently", "still"};
const std::set<std::string, std::less<>> kParticiple = {
    "made", "manufactured", "built", "supplied", "located", "hosted", "owned", "served",
    "managed", "distributed", "found", "commissioned", "detected", "installed", "produced"};
const std::set<std::string, std::less<>> kVerb = {
    "have", "has", "had", "make", "makes", "manufacture", "manufactures", "build", "builds",
    "supply", "supplies", "host", "hosts", "own", "owns", "serve", "serves", "manage",
    "manages", "distribute", "distributes", "is", "are", "was", "were", "be", "been", "do",
    "does", "did", "list", "show", "find", "give", "get", "contain", "contains", "belong",
    "belongs", "produce", "produces", "install", "feed", "feeds", "exist", "exists", "suffer",
    "suffered", "show", "display", "tell", "return", "count"};

bool is_verb_word(const std::string& w) { return kVerb.count(w) || kParticiple.count(w); }

struct Unit {
  std::size_t begin, end;  // tokens
  Cat cat;
  bool participle = false;
  bool temporal = false;
  bool tagged = false;
  std::size_t head() const { return end - 1; }
};

Cat operator_category(const std::string& last) {
  if (kDet.count(last)) return Cat::Det;
  if (kAdv.count(last)) return Cat::Adv;
  if (kConj.count(last)) return Cat::Conj;
  return Cat::Prep;
}

std::vector<Unit> make_units(const TaggedQuestion& q) {
  std::vector<Unit> units;
  std::size_t i = 0;
  std::size_t next_tag = 0;
  while (i < q.tokens.size()) {
    if (next_tag < q.tags.size() && q.tags[next_tag].begin == i) {
      const EntityTag& t = q.tags[next_tag++];
      Unit u{t.begin, t.end, Cat::Noun};
      u.tagged = true;
      const std::string& last = q.tokens[t.end - 1].text;
      switch (t.kind) {
        case TagKind::QuestionWord:
          u.cat = t.binding.ref == "list" ? Cat::Verb : Cat::Wh;
          break;
        case TagKind::Logic:
        case TagKind::Time:
          if (t.binding.kind == BindingKind::Operator) u.cat = operator_category(last);
          else u.temporal = true;
          break;
        case TagKind::Attribute:
          if (t.end - t.begin == 1 && is_verb_word(last)) {
            u.cat = Cat::Verb;
            u.participle = kParticiple.count(last) > 0;
          }
          break;
        default:
          break;
      }
      units.push_back(u);
      i = t.end;
      continue;
    }
    const Token& tok = q.tokens[i];
    Unit u{i, i + 1, Cat::Noun};
    if (!tok.quoted) {
      const std::string& w = tok.text;
      if (kWh.count(w)) u.cat = Cat::Wh;
      else if (kDet.count(w)) u.cat = Cat::Det;
      else if (kConj.count(w)) u.cat = Cat::Conj;
      else if (kAdv.count(w)) u.cat = Cat::Adv;
      else if (kPrep.count(w)) u.cat = Cat::Prep;
      else if (is_verb_word(w)) {
        u.cat = Cat::Verb;
        u.participle = kParticiple.count(w) > 0;
      }
    }
    units.push_back(u);
    ++i;
  }
  return units;
}

enum class ElemKind { NP, Verb, Prep, Conj, Adv, Other };

struct Element {
  ElemKind kind;
  std::vector<std::size_t> units;  // indices into units
  std::size_t head = 0;            // head token
  bool temporal = false;
  bool participle = false;
};

std::string pos_of(const Unit& u, const Token& tok) {
  switch (u.cat) {
    case Cat::Noun: {
      if (u.temporal) return "CD";
      bool digits = !tok.text.empty() && std::isdigit(static_cast<unsigned char>(tok.text[0]));
      return digits ? "CD" : "NN";
    }
    case Cat::Det: return "DT";
    case Cat::Wh: return "WDT";
    case Cat::Verb: return u.participle ? "VBN" : "VB";
    case Cat::Prep: return "IN";
    case Cat::Conj: return "CC";
    case Cat::Adv: return "RB";
  }
  return "NN";
}

}  // namespace

DependencyTree parse_dependencies(const TaggedQuestion& q) {
  const std::size_t n = q.tokens.size();
  if (n == 0) throw Error(ErrorCode::EmptyQuestion, "empty question");
  std::vector<Unit> units = make_units(q);

  std::vector<DepToken> tokens(n);
  std::vector<std::optional<std::size_t>> heads(n);
  std::vector<std::string> labels(n, "dep");
  for (const auto& u : units)
    for (std::size_t t = u.begin; t < u.end; ++t) tokens[t] = {q.tokens[t].text, pos_of(u, q.tokens[t])};

  // Multi-token units hang off their last token.
  for (const auto& u : units) {
    bool fixed = u.cat != Cat::Noun;
    for (std::size_t t = u.begin; t + 1 < u.end; ++t) {
      heads[t] = u.head();
      labels[t] = fixed ? "fixed" : "compound";
    }
  }

  // Noun-phrase chunking: (Wh|Det)* Noun+ ; a lone Wh is a pronoun phrase.
  std::vector<Element> elems;
  for (std::size_t k = 0; k < units.size();) {
    const Unit& u = units[k];
    if (u.cat == Cat::Wh || u.cat == Cat::Det || u.cat == Cat::Noun) {
      std::size_t j = k;
      while (j < units.size() && (units[j].cat == Cat::Wh || units[j].cat == Cat::Det)) ++j;
      std::size_t nouns = j;
      while (nouns < units.size() && units[nouns].cat == Cat::Noun) ++nouns;
      if (nouns > j) {
        Element e{ElemKind::NP, {}, units[nouns - 1].head()};
        for (std::size_t m = k; m < nouns; ++m) e.units.push_back(m);
        e.temporal = units[nouns - 1].temporal;
        elems.push_back(std::move(e));
        k = nouns;
        continue;
      }
      if (u.cat == Cat::Wh) {
        elems.push_back({ElemKind::NP, {k}, u.head()});
        ++k;
        continue;
      }
      elems.push_back({ElemKind::Other, {k}, u.head()});
      ++k;
      continue;
    }
    ElemKind kind = u.cat == Cat::Verb   ? ElemKind::Verb
                    : u.cat == Cat::Prep ? ElemKind::Prep
                    : u.cat == Cat::Conj ? ElemKind::Conj
                                         : ElemKind::Adv;
    Element e{kind, {k}, u.head()};
    e.participle = u.participle;
    elems.push_back(std::move(e));
    ++k;
  }

  // NP-internal structure: modifiers attach to the NP head.
  for (const auto& e : elems) {
    if (e.kind != ElemKind::NP) continue;
    for (std::size_t m : e.units) {
      const Unit& u = units[m];
      if (u.head() == e.head) continue;
      heads[u.head()] = e.head;
      labels[u.head()] = u.cat == Cat::Noun ? (tokens[u.head()].pos == "CD" ? "nummod" : "compound")
                                            : "det";
    }
  }

  // Root: first verb, skipping a participle that opens a prepositional
  // phrase while a later verb exists ("transformers made by X have ...").
  std::optional<std::size_t> root_elem;
  for (std::size_t k = 0; k < elems.size() && !root_elem; ++k) {
    if (elems[k].kind != ElemKind::Verb) continue;
    bool later_verb = false;
    for (std::size_t m = k + 1; m < elems.size(); ++m)
      if (elems[m].kind == ElemKind::Verb) later_verb = true;
    bool opens_pp = k + 1 < elems.size() && elems[k + 1].kind == ElemKind::Prep;
    if (elems[k].participle && opens_pp && later_verb && k > 0) continue;
    root_elem = k;
  }
  if (!root_elem) {
    for (std::size_t k = 0; k < elems.size() && !root_elem; ++k)
      if (elems[k].kind == ElemKind::NP) root_elem = k;
  }
  if (!root_elem) throw Error(ErrorCode::UnparseableInput, "no verb or noun phrase to root the parse");
  const std::size_t root = elems[*root_elem].head;
  const bool root_is_verb = elems[*root_elem].kind == ElemKind::Verb;
  labels[root] = "root";
  heads[root] = std::nullopt;

  auto attach = [&](std::size_t token, std::size_t head, const char* label) {
    if (token == root) return;
    heads[token] = head;
    labels[token] = label;
  };

  // Walk elements left to right tracking the latest NP head and verb.
  std::optional<std::size_t> last_np, last_verb;
  std::optional<std::size_t> verb_wanting_obj;
  bool subject_taken = false;
  std::vector<std::size_t> pending_case;  // prepositions waiting for their NP
  std::vector<std::size_t> pending_mod;   // adverbs/conjunctions waiting for a head
  std::vector<std::size_t> pending_cc;
  std::optional<std::size_t> conj_anchor;
  bool pp_after_verb = false;

  for (std::size_t k = 0; k < elems.size(); ++k) {
    const Element& e = elems[k];
    const bool is_root = k == *root_elem;
    switch (e.kind) {
      case ElemKind::Verb: {
        if (!is_root) {
          if (e.participle && k > 0 && elems[k - 1].kind == ElemKind::NP && last_np)
            attach(e.head, *last_np, "acl");
          else if (root_is_verb && k > *root_elem)
            attach(e.head, root, "xcomp");
          else
            attach(e.head, root, "dep");
        }
        for (std::size_t t : pending_mod) attach(t, e.head, "advmod");
        pending_mod.clear();
        for (std::size_t t : pending_case) attach(t, root, "dep");
        pending_case.clear();
        last_verb = e.head;
        verb_wanting_obj = e.head;
        break;
      }
      case ElemKind::Prep:
        if (pending_case.empty()) pp_after_verb = k > 0 && elems[k - 1].kind == ElemKind::Verb;
        pending_case.push_back(e.head);
        break;
      case ElemKind::Conj:
        pending_cc.push_back(e.head);
        conj_anchor = last_np;
        break;
      case ElemKind::Adv:
      case ElemKind::Other:
        pending_mod.push_back(e.head);
        break;
      case ElemKind::NP: {
        for (std::size_t t : pending_mod) attach(t, e.head, "advmod");
        pending_mod.clear();
        if (!pending_case.empty()) {
          for (std::size_t t : pending_case) attach(t, e.head, "case");
          pending_case.clear();
          if (pp_after_verb && last_verb) {
            attach(e.head, *last_verb, "obl");
          } else if (e.temporal && root_is_verb) {
            attach(e.head, root, "obl");
          } else if (last_np) {
            attach(e.head, *last_np, "nmod");
          } else if (last_verb) {
            attach(e.head, *last_verb, "obl");
          } else {
            attach(e.head, root, "nmod");
          }
        } else if (!pending_cc.empty() && conj_anchor) {
          for (std::size_t t : pending_cc) attach(t, e.head, "cc");
          pending_cc.clear();
          attach(e.head, *conj_anchor, "conj");
        } else if (verb_wanting_obj) {
          attach(e.head, *verb_wanting_obj, "obj");
          verb_wanting_obj.reset();
        } else if (root_is_verb && k < *root_elem && !subject_taken) {
          attach(e.head, root, "nsubj");
          subject_taken = true;
        } else if (last_np) {
          attach(e.head, *last_np, "dep");
        } else {
          attach(e.head, root, "dep");
        }
        for (std::size_t t : pending_cc) attach(t, e.head, "cc");
        pending_cc.clear();
        last_np = e.head;
        break;
      }
    }
  }
  for (std::size_t t : pending_case) attach(t, root, "dep");
  for (std::size_t t : pending_mod) attach(t, root, "dep");
  for (std::size_t t : pending_cc) attach(t, root, "dep");

  return DependencyTree(std::move(tokens), std::move(heads), std::move(labels));
}

}  // namespace gridqa
