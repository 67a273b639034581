#include "gridqa/server.hpp"

#include <deque>
#include <set>

#include <httplib.h>

namespace gridqa {

using nlohmann::json;

std::string_view to_string(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::BadRequest: return "bad_request";
    case ApiErrorCode::NotFound: return "not_found";
    case ApiErrorCode::ParseFailed: return "parse_failed";
    case ApiErrorCode::NoTarget: return "no_target";
    case ApiErrorCode::Internal: return "internal";
  }
  return "internal";
}

int http_status(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::BadRequest: return 400;
    case ApiErrorCode::NotFound: return 404;
    case ApiErrorCode::ParseFailed:
    case ApiErrorCode::NoTarget: return 422;
    case ApiErrorCode::Internal: return 500;
  }
  return 500;
}

ApiErrorCode api_error_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyQuestion:
    case ErrorCode::ParseError: return ApiErrorCode::BadRequest;
    case ErrorCode::UnknownVertex:
    case ErrorCode::UnknownSession: return ApiErrorCode::NotFound;
    case ErrorCode::NoTargetFound:
    case ErrorCode::UnresolvedTarget: return ApiErrorCode::NoTarget;
    case ErrorCode::UnparseableInput:
    case ErrorCode::DanglingQualifier:
    case ErrorCode::NoPath:
    case ErrorCode::UnknownAttribute:
    case ErrorCode::TypeMismatch: return ApiErrorCode::ParseFailed;
    default: return ApiErrorCode::Internal;
  }
}

ApiResponse Api::error(ApiErrorCode code, const std::string& message, json detail) {
  json e{{"code", to_string(code)}, {"message", message}};
  if (!detail.is_null()) e["detail"] = std::move(detail);
  return {http_status(code), json{{"error", e}}};
}

namespace {

ApiResponse from_error(const Error& e) {
  ApiErrorCode code = api_error_code(e.code());
  // Internal failures keep their text out of the body.
  std::string message = code == ApiErrorCode::Internal ? "internal error" : e.what();
  json detail{{"error", to_string(e.code())}};
  return Api::error(code, message, detail);
}

std::optional<json> parse_body(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

template <typename F>
ApiResponse guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return from_error(e);
  } catch (const std::exception&) {
    return Api::error(ApiErrorCode::Internal, "internal error");
  }
}

}  // namespace

ApiResponse Api::ask(const std::string& body) const {
  return guarded([&]() -> ApiResponse {
    auto j = parse_body(body);
    if (!j) return error(ApiErrorCode::BadRequest, "body must be a JSON object");
    if (!j->contains("question") || !(*j)["question"].is_string())
      return error(ApiErrorCode::BadRequest, "missing question");
    std::string question = (*j)["question"].get<std::string>();
    if (question.find_first_not_of(" \t\r\n") == std::string::npos)
      return error(ApiErrorCode::BadRequest, "empty question");
    std::optional<std::string> deps;
    if (j->contains("deps") && !(*j)["deps"].is_null()) {
      if (!(*j)["deps"].is_string()) return error(ApiErrorCode::BadRequest, "deps must be a string");
      deps = (*j)["deps"].get<std::string>();
    }
    std::optional<std::string> session;
    if (j->contains("session") && !(*j)["session"].is_null()) {
      if (!(*j)["session"].is_string()) return error(ApiErrorCode::BadRequest, "session must be a string");
      session = (*j)["session"].get<std::string>();
    }
    AskMode mode = session ? AskMode::FollowUp : AskMode::Fresh;
    if (j->contains("mode") && !(*j)["mode"].is_null()) {
      auto m = (*j)["mode"].is_string() ? ask_mode_from_string((*j)["mode"].get<std::string>())
                                        : std::nullopt;
      if (!m) return error(ApiErrorCode::BadRequest, "mode must be fresh or follow_up");
      mode = *m;
    }
    if (!session) {
      Answer a = engine_.ask(question, deps);
      return {200, a.to_json(engine_.store())};
    }
    return sessions_.with_session(*session, [&](Session& s) {
      Answer a = s.ask(engine_, question, mode, deps);
      json out = a.to_json(engine_.store());
      out["session"] = s.id();
      out["mode"] = to_string(mode);
      return ApiResponse{200, out};
    });
  });
}

ApiResponse Api::create_session() const {
  return guarded([&] { return ApiResponse{200, json{{"session", sessions_.create()}}}; });
}

ApiResponse Api::anchor(const std::string& session, const std::string& body) const {
  return guarded([&]() -> ApiResponse {
    auto j = parse_body(body);
    if (!j || !j->contains("vertex") || !(*j)["vertex"].is_string())
      return error(ApiErrorCode::BadRequest, "missing vertex");
    std::string vertex = (*j)["vertex"].get<std::string>();
    return sessions_.with_session(session, [&](Session& s) {
      s.anchor(engine_, vertex);
      json constraints = json::array();
      for (const auto& c : s.context().constraints) constraints.push_back(to_json(c));
      return ApiResponse{200, json{{"session", s.id()}, {"vertex", vertex}, {"constraints", constraints}}};
    });
  });
}

ApiResponse Api::schema() const {
  return guarded([&] { return ApiResponse{200, engine_.schema().to_json()}; });
}

ApiResponse Api::neighborhood(const std::optional<std::string>& vertex,
                              const std::optional<std::string>& hops) const {
  return guarded([&]() -> ApiResponse {
    if (!vertex || vertex->empty()) return error(ApiErrorCode::BadRequest, "missing vertex");
    std::size_t depth = 1;
    if (hops) {
      try {
        std::size_t used = 0;
        long h = std::stol(*hops, &used);
        if (used != hops->size() || h < 0 || h > 3) throw std::out_of_range("hops");
        depth = static_cast<std::size_t>(h);
      } catch (const std::exception&) {
        return error(ApiErrorCode::BadRequest, "hops must be an integer in [0, 3]");
      }
    }
    const GraphStore& store = engine_.store();
    auto start = store.index_of(*vertex);
    if (!start) return error(ApiErrorCode::NotFound, "unknown vertex '" + *vertex + "'");
    std::set<VertexIndex> seen{*start};
    std::set<std::uint32_t> edges;
    std::vector<VertexIndex> frontier{*start};
    for (std::size_t d = 0; d < depth; ++d) {
      std::vector<VertexIndex> next;
      for (VertexIndex v : frontier) {
        for (auto list : {store.out_edges(v), store.in_edges(v)}) {
          for (const auto& a : list) {
            edges.insert(a.edge);
            if (seen.insert(a.neighbor).second) next.push_back(a.neighbor);
          }
        }
      }
      frontier = std::move(next);
    }
    json vs = json::array();
    for (VertexIndex v : seen) vs.push_back(vertex_to_json(store.vertex(v)));
    json es = json::array();
    for (auto e : edges) es.push_back(edge_to_json(store.edge(e)));
    return ApiResponse{200, json{{"center", *vertex}, {"hops", depth}, {"vertices", vs}, {"edges", es}}};
  });
}

ApiResponse Api::health() const {
  return guarded([&] {
    const auto& s = engine_.store();
    return ApiResponse{200, json{{"status", "ok"},
                                 {"schema_version", engine_.schema().version()},
                                 {"classes", engine_.schema().classes().size()},
                                 {"edge_types", engine_.schema().edge_types().size()},
                                 {"vertices", s.vertex_count()},
                                 {"edges", s.edges().size()},
                                 {"lexicon_entries", engine_.lexicon().size()},
                                 {"sessions", sessions_.size()}}};
  });
}

// ---------------------------------------------------------------------------

struct Server::Impl {
  Impl(const Engine& engine, ServerConfig cfg)
      : config(std::move(cfg)), sessions(config.session_ttl), api(engine, sessions) {}

  ServerConfig config;
  SessionRegistry sessions;
  Api api;
  httplib::Server http;
};

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json; charset=utf-8");
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

}  // namespace

Server::Server(const Engine& engine, ServerConfig config)
    : impl_(std::make_unique<Impl>(engine, std::move(config))) {
  auto& http = impl_->http;
  Api& api = impl_->api;
  http.Post("/api/ask", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.ask(req.body));
  });
  http.Post("/api/session", [&api](const httplib::Request&, httplib::Response& res) {
    reply(res, api.create_session());
  });
  http.Post(R"(/api/session/([^/]+)/anchor)", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.anchor(req.matches[1], req.body));
  });
  http.Get("/api/schema", [&api](const httplib::Request&, httplib::Response& res) {
    reply(res, api.schema());
  });
  http.Get("/api/graph/neighborhood", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.neighborhood(param(req, "vertex"), param(req, "hops")));
  });
  http.Get("/api/health", [&api](const httplib::Request&, httplib::Response& res) {
    reply(res, api.health());
  });
  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    reply(res, Api::error(ApiErrorCode::Internal, "internal error"));
  });
  http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && req.path.rfind("/api/", 0) == 0)
      reply(res, Api::error(ApiErrorCode::NotFound, "no such endpoint"));
  });
  if (impl_->config.static_dir) http.set_mount_point("/", impl_->config.static_dir->string());
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& cfg = impl_->config;
  int port = cfg.port == 0 ? impl_->http.bind_to_any_port(cfg.host)
                           : (impl_->http.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1);
  if (port < 0)
    throw Error(ErrorCode::IoError, "cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  return port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_) impl_->http.stop();
}

SessionRegistry& Server::sessions() { return impl_->sessions; }

}  // namespace gridqa
