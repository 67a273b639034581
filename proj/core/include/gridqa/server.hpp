#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "gridqa/engine.hpp"
#include "gridqa/session.hpp"

namespace gridqa {

enum class ApiErrorCode { BadRequest, NotFound, ParseFailed, NoTarget, Internal };

std::string_view to_string(ApiErrorCode code);
int http_status(ApiErrorCode code);
ApiErrorCode api_error_code(ErrorCode code);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Transport-free request handlers; the HTTP server only routes to these.
class Api {
 public:
  Api(const Engine& engine, SessionRegistry& sessions) : engine_(engine), sessions_(sessions) {}

  /// Body: {"question", "session"?, "mode"?, "deps"?}. With a session the
  /// mode defaults to follow_up; without one every call is independent.
  ApiResponse ask(const std::string& body) const;
  ApiResponse create_session() const;
  /// Body: {"vertex"}.
  ApiResponse anchor(const std::string& session, const std::string& body) const;
  ApiResponse schema() const;
  ApiResponse neighborhood(const std::optional<std::string>& vertex,
                           const std::optional<std::string>& hops) const;
  ApiResponse health() const;

  static ApiResponse error(ApiErrorCode code, const std::string& message,
                           nlohmann::json detail = nullptr);

 private:
  const Engine& engine_;
  SessionRegistry& sessions_;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
  std::chrono::milliseconds session_ttl = std::chrono::minutes(30);
};

class Server {
 public:
  Server(const Engine& engine, ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the socket; returns the bound port or throws IoError.
  int bind();
  /// Serves until stop(); call after bind().
  void run();
  void stop();
  SessionRegistry& sessions();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gridqa
