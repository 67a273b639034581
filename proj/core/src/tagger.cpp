#include <algorithm>
#include <cctype>
#include <charconv>

#include "gridqa/error.hpp"
#include "gridqa/nlq.hpp"

namespace gridqa {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty() || !(s[0] >= '0' && s[0] <= '9')) return std::nullopt;
  double out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return out;
}

std::optional<std::int64_t> number_word(std::string_view s) {
  static const std::pair<std::string_view, std::int64_t> words[] = {
      {"one", 1},     {"two", 2},      {"three", 3},    {"four", 4},    {"five", 5},
      {"six", 6},     {"seven", 7},    {"eight", 8},    {"nine", 9},    {"ten", 10},
      {"eleven", 11}, {"twelve", 12},  {"fifteen", 15}, {"twenty", 20}, {"thirty", 30}};
  for (const auto& [w, n] : words)
    if (w == s) return n;
  if (all_digits(s) && s.size() <= 4) return std::stoll(std::string(s));
  return std::nullopt;
}

std::optional<Duration::Unit> duration_unit(std::string_view s) {
  if (s == "year" || s == "years") return Duration::Unit::Year;
  if (s == "month" || s == "months") return Duration::Unit::Month;
  if (s == "day" || s == "days") return Duration::Unit::Day;
  return std::nullopt;
}

std::string join(const std::vector<Token>& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

}  // namespace

std::string normalize_word(std::string_view word) {
  std::size_t b = 0, e = word.size();
  while (b < e && !is_word_char(word[b])) ++b;
  while (e > b && !is_word_char(word[e - 1])) --e;
  return to_lower(word.substr(b, e - b));
}

std::vector<Token> tokenize(std::string_view question) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < question.size()) {
    if (is_space(question[i])) {
      ++i;
      continue;
    }
    char c = question[i];
    if (c == '"' || c == '\'') {
      auto close = question.find(c, i + 1);
      if (close != std::string_view::npos) {
        std::string_view inner = question.substr(i + 1, close - i - 1);
        while (!inner.empty() && is_space(inner.front())) inner.remove_prefix(1);
        while (!inner.empty() && is_space(inner.back())) inner.remove_suffix(1);
        if (!inner.empty()) out.push_back({std::string(inner), true});
        i = close + 1;
        continue;
      }
    }
    std::size_t j = i;
    while (j < question.size() && !is_space(question[j])) ++j;
    std::string word = normalize_word(question.substr(i, j - i));
    if (!word.empty()) out.push_back({std::move(word), false});
    i = j;
  }
  return out;
}

std::optional<std::size_t> TaggedQuestion::tag_at(std::size_t token) const {
  for (std::size_t i = 0; i < tags.size(); ++i)
    if (tags[i].begin <= token && token < tags[i].end) return i;
  return std::nullopt;
}

Tagger::Tagger(const OntologySchema& schema, const GraphStore& store, const Lexicon& lexicon)
    : schema_(&schema) {
  auto add = [&](const std::string& phrase, Phrase p) {
    std::vector<std::string> key;
    for (auto& t : tokenize(phrase)) key.push_back(std::move(t.text));
    if (key.empty()) return false;
    longest_ = std::max(longest_, key.size());
    return phrases_.emplace(std::move(key), std::move(p)).second;
  };
  for (const auto& e : lexicon.entries()) {
    Phrase p{e.binds_to, e.tag_kind, TagSource::Lexicon};
    add(e.surface, p);
    for (const auto& v : e.variants) add(v, p);
  }
  // Vertex names; ids ascend, so the smallest id wins a shared name.
  for (const auto& v : store.vertices()) {
    const Value* name = v.attr("name");
    if (!name || !std::holds_alternative<std::string>(*name)) continue;
    Phrase p{Binding{BindingKind::Instance, v.id, std::nullopt}, TagKind::Instance,
             TagSource::Gazetteer};
    if (add(std::get<std::string>(*name), p)) ++gazetteer_size_;
  }
}

std::optional<std::pair<std::size_t, EntityTag>> Tagger::builtin_at(
    const std::vector<Token>& tokens, std::size_t i) const {
  auto literal = [&](std::size_t len, TagKind kind, std::string ref, Value v) {
    EntityTag t;
    t.begin = i;
    t.end = i + len;
    t.surface = join(tokens, i, i + len);
    t.kind = kind;
    t.binding = Binding{BindingKind::Literal, std::move(ref), std::move(v)};
    t.source = TagSource::Builtin;
    return std::make_pair(len, std::move(t));
  };
  auto unit_value = [&](std::size_t len, double number,
                        std::string_view unit) -> std::optional<std::pair<std::size_t, EntityTag>> {
    for (const auto& cls : schema_->classes())
      for (const auto& a : cls.attributes) {
        if (!a.unit || to_lower(*a.unit) != unit) continue;
        auto v = coerce(Value{number}, a.datatype);
        if (!v) return std::nullopt;
        auto out = literal(len, TagKind::Value, "", *v);
        out.second.binding = Binding{BindingKind::Value, cls.name + "." + a.name, *v};
        return out;
      }
    return std::nullopt;
  };

  const Token& tok = tokens[i];
  if (tok.quoted) return literal(1, TagKind::Value, "string", Value{tok.text});
  const std::string& w = tok.text;

  if (i + 1 < tokens.size() && !tokens[i + 1].quoted) {
    if (auto n = number_word(w)) {
      if (auto u = duration_unit(tokens[i + 1].text))
        return literal(2, TagKind::Time, "duration", Value{Duration{*n, *u}});
    }
    if (auto n = parse_number(w)) {
      if (auto r = unit_value(2, *n, tokens[i + 1].text)) return r;
    }
  }
  if (auto d = parse_date(w)) return literal(1, TagKind::Time, "date", Value{*d});
  if (all_digits(w) && w.size() == 4) {
    int year = std::stoi(w);
    if (year >= 1900 && year <= 2100)
      return literal(1, TagKind::Time, "year", Value{static_cast<std::int64_t>(year)});
  }
  std::size_t split = 0;
  while (split < w.size() && (std::isdigit(static_cast<unsigned char>(w[split])) || w[split] == '.'))
    ++split;
  if (split > 0 && split < w.size()) {
    if (auto n = parse_number(std::string_view(w).substr(0, split))) {
      if (auto r = unit_value(1, *n, std::string_view(w).substr(split))) return r;
    }
  }
  if (auto n = parse_number(w)) {
    Value v = all_digits(w) ? Value{static_cast<std::int64_t>(*n)} : Value{*n};
    return literal(1, TagKind::Value, "number", v);
  }
  return std::nullopt;
}

TaggedQuestion Tagger::tag(std::string_view question) const {
  TaggedQuestion out;
  out.raw = std::string(question);
  out.tokens = tokenize(question);
  if (out.tokens.empty()) throw Error(ErrorCode::EmptyQuestion, "empty question");

  const auto& tokens = out.tokens;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::optional<EntityTag> best;
    std::size_t best_len = 0;
    if (!tokens[i].quoted) {
      std::vector<std::string> key;
      for (std::size_t len = 1; len <= longest_ && i + len <= tokens.size(); ++len) {
        if (tokens[i + len - 1].quoted) break;
        key.push_back(tokens[i + len - 1].text);
        auto it = phrases_.find(key);
        if (it == phrases_.end()) continue;
        EntityTag t;
        t.begin = i;
        t.end = i + len;
        t.surface = join(tokens, i, i + len);
        t.kind = it->second.kind;
        t.binding = it->second.binding;
        t.source = it->second.source;
        best = std::move(t);
        best_len = len;
      }
    }
    // Built-ins only win when strictly longer than a dictionary match.
    if (auto b = builtin_at(tokens, i); b && b->first > best_len) {
      best_len = b->first;
      best = std::move(b->second);
    }
    if (best) {
      out.tags.push_back(std::move(*best));
      i += best_len;
    } else {
      ++i;
    }
  }
  return out;
}

TaggedQuestion tag_entities(const OntologySchema& schema, const GraphStore& store,
                            const Lexicon& lexicon, std::string_view question) {
  return Tagger(schema, store, lexicon).tag(question);
}

}  // namespace gridqa
