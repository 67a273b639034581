#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridqa/engine.hpp"
#include "gridqa/error.hpp"

namespace gridqa {

enum class AskMode { Fresh, FollowUp };

std::string_view to_string(AskMode mode);
std::optional<AskMode> ask_mode_from_string(std::string_view name);

/// Target and constraints carried between turns.
struct Context {
  std::optional<Target> target;
  std::vector<Constraint> constraints;

  bool operator==(const Context&) const = default;
};

/// Follow-up merge: constraints with an inherited merge key replace it in
/// place, others append; the target changes only if `next` names one.
ParsedQuestion merge(const Context& context, const ParsedQuestion& next);

struct Turn {
  enum class Kind { Ask, Anchor } kind = Kind::Ask;
  std::string question;  // Ask
  AskMode mode = AskMode::Fresh;
  std::optional<std::string> conllu;
  std::string vertex;  // Anchor
  bool ok = false;
  std::optional<ErrorCode> error;
  std::string message;
  std::optional<ParsedQuestion> effective;
  std::optional<nlohmann::json> plan;
  std::optional<nlohmann::json> answer;  // canonical, no timing

  nlohmann::json to_json() const;
};

class Session {
 public:
  explicit Session(std::string id) : id_(std::move(id)) {}

  const std::string& id() const { return id_; }
  const Context& context() const { return context_; }
  const std::vector<Turn>& turns() const { return turns_; }

  /// Failed turns are recorded and rethrown; the context is left untouched.
  Answer ask(const Engine& engine, const std::string& question, AskMode mode,
             const std::optional<std::string>& conllu = {});
  /// Adds an instance constraint on the vertex and clears the target.
  /// Throws UnknownVertex.
  void anchor(const Engine& engine, const std::string& vertex_id);

  /// JSON array of turn records.
  nlohmann::json transcript() const;

 private:
  std::string id_;
  Context context_;
  std::vector<Turn> turns_;
};

/// Re-runs a transcript in a fresh session; returns the new transcript.
nlohmann::json replay(const Engine& engine, const nlohmann::json& transcript);

/// In-memory sessions with idle expiry. Calls on one session are serialized;
/// different sessions proceed concurrently.
class SessionRegistry {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit SessionRegistry(std::chrono::milliseconds ttl = std::chrono::minutes(30),
                           Clock clock = {});

  std::string create();
  bool remove(const std::string& id);
  std::size_t size() const;
  /// Drops expired sessions; returns how many.
  std::size_t sweep();

  /// Runs `fn(Session&)` under the session lock. Throws UnknownSession for
  /// missing or expired ids.
  template <typename F>
  auto with_session(const std::string& id, F&& fn) {
    std::shared_ptr<Entry> entry = acquire(id);
    std::lock_guard lock(entry->mutex);
    entry->last_used = now();
    return fn(entry->session);
  }

 private:
  struct Entry {
    explicit Entry(std::string id) : session(std::move(id)) {}
    std::mutex mutex;
    Session session;
    std::chrono::steady_clock::time_point last_used;
  };

  std::chrono::steady_clock::time_point now() const;
  std::shared_ptr<Entry> acquire(const std::string& id);

  std::chrono::milliseconds ttl_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace gridqa
