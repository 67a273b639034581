#include "gridqa/session.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace gridqa {

using nlohmann::json;

std::string_view to_string(AskMode mode) {
  return mode == AskMode::Fresh ? "fresh" : "follow_up";
}

std::optional<AskMode> ask_mode_from_string(std::string_view name) {
  if (name == "fresh") return AskMode::Fresh;
  if (name == "follow_up") return AskMode::FollowUp;
  return std::nullopt;
}

ParsedQuestion merge(const Context& context, const ParsedQuestion& next) {
  ParsedQuestion out;
  out.raw = next.raw;
  out.target = next.target ? next.target : context.target;
  out.constraints = context.constraints;
  for (const auto& c : next.constraints) {
    auto same = std::find_if(out.constraints.begin(), out.constraints.end(),
                             [&](const Constraint& old) { return old.merge_key() == c.merge_key(); });
    if (same != out.constraints.end()) *same = c;
    else out.constraints.push_back(c);
  }
  // The merged set reads as one conjunction unless the new turn says otherwise.
  if (!out.constraints.empty() && out.constraints.front().connector == Connector::Or)
    out.constraints.front().connector = Connector::And;
  return out;
}

json Turn::to_json() const {
  json j{{"kind", kind == Kind::Ask ? "ask" : "anchor"}, {"ok", ok}};
  if (kind == Kind::Ask) {
    j["question"] = question;
    j["mode"] = to_string(mode);
    j["deps"] = conllu ? json(*conllu) : json(nullptr);
  } else {
    j["vertex"] = vertex;
  }
  if (error) {
    j["error"] = to_string(*error);
    j["message"] = message;
  }
  if (effective) j["effective"] = effective->to_json();
  if (plan) j["plan"] = *plan;
  if (answer) j["answer"] = *answer;
  return j;
}

Answer Session::ask(const Engine& engine, const std::string& question, AskMode mode,
                    const std::optional<std::string>& conllu) {
  Turn turn;
  turn.question = question;
  turn.mode = mode;
  turn.conllu = conllu;
  try {
    if (question.find_first_not_of(" \t\r\n") == std::string::npos)
      throw Error(ErrorCode::EmptyQuestion, "empty question");
    Analysis a = engine.analyze(question, conllu, mode == AskMode::Fresh);
    ParsedQuestion effective = mode == AskMode::Fresh ? a.parsed : merge(context_, a.parsed);
    turn.effective = effective;
    Answer answer = engine.answer(effective);
    turn.ok = true;
    turn.plan = answer.plan.to_json();
    turn.answer = answer.graph.to_json(engine.store(), false);
    context_ = Context{answer.parsed.target, answer.parsed.constraints};
    turns_.push_back(std::move(turn));
    return answer;
  } catch (const Error& e) {
    turn.error = e.code();
    turn.message = e.what();
    turns_.push_back(std::move(turn));
    throw;
  }
}

void Session::anchor(const Engine& engine, const std::string& vertex_id) {
  Turn turn;
  turn.kind = Turn::Kind::Anchor;
  turn.vertex = vertex_id;
  const Vertex* v = engine.store().find_vertex(vertex_id);
  if (!v) {
    turn.error = ErrorCode::UnknownVertex;
    turn.message = "unknown vertex '" + vertex_id + "'";
    turns_.push_back(std::move(turn));
    throw Error(ErrorCode::UnknownVertex, "unknown vertex '" + vertex_id + "'");
  }
  Constraint c;
  c.kind = ConstraintKind::Instance;
  c.cls = v->cls;
  c.vertex = v->id;
  c.value = Value{v->id};
  c.cmp = Comparison::Eq;
  const Value* name = v->attr("name");
  c.surface = name ? to_string(*name) : v->id;
  ParsedQuestion next{"", std::nullopt, {c}};
  Context updated{std::nullopt, merge(context_, next).constraints};
  context_ = std::move(updated);
  turn.ok = true;
  turns_.push_back(std::move(turn));
}

json Session::transcript() const {
  json a = json::array();
  for (const auto& t : turns_) a.push_back(t.to_json());
  return a;
}

json replay(const Engine& engine, const json& transcript) {
  Session s("replay");
  for (const auto& t : transcript) {
    try {
      if (t.at("kind") == "anchor") {
        s.anchor(engine, t.at("vertex").get<std::string>());
      } else {
        std::optional<std::string> deps;
        if (t.contains("deps") && t["deps"].is_string()) deps = t["deps"].get<std::string>();
        auto mode = ask_mode_from_string(t.at("mode").get<std::string>());
        if (!mode) throw Error(ErrorCode::ParseError, "bad mode in transcript");
        s.ask(engine, t.at("question").get<std::string>(), *mode, deps);
      }
    } catch (const Error&) {
      // recorded in the new transcript
    }
  }
  return s.transcript();
}

// ---------------------------------------------------------------------------

SessionRegistry::SessionRegistry(std::chrono::milliseconds ttl, Clock clock)
    : ttl_(ttl), clock_(std::move(clock)) {}

std::chrono::steady_clock::time_point SessionRegistry::now() const {
  return clock_ ? clock_() : std::chrono::steady_clock::now();
}

std::string SessionRegistry::create() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex_);
  char buf[40];
  std::snprintf(buf, sizeof buf, "s%04llx%012llx", static_cast<unsigned long long>(++counter_ & 0xffff),
                static_cast<unsigned long long>(rng() & 0xffffffffffffULL));
  std::string id(buf);
  auto entry = std::make_shared<Entry>(id);
  entry->last_used = now();
  sessions_.emplace(id, std::move(entry));
  return id;
}

bool SessionRegistry::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  return sessions_.erase(id) > 0;
}

std::size_t SessionRegistry::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::size_t SessionRegistry::sweep() {
  auto t = now();
  std::lock_guard lock(mutex_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock entry_lock(it->second->mutex, std::try_to_lock);
    if (entry_lock.owns_lock() && t - it->second->last_used > ttl_) {
      entry_lock.unlock();
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::shared_ptr<SessionRegistry::Entry> SessionRegistry::acquire(const std::string& id) {
  auto t = now();
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'");
  std::unique_lock entry_lock(it->second->mutex, std::try_to_lock);
  // A session busy in another call is in use, hence not idle.
  if (entry_lock.owns_lock() && t - it->second->last_used > ttl_) {
    entry_lock.unlock();
    sessions_.erase(it);
    throw Error(ErrorCode::UnknownSession, "session '" + id + "' expired");
  }
  return it->second;
}

}  // namespace gridqa
