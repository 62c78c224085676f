#pragma once

// HTTP routes over a SessionRegistry. Bodies are JSON.
//
//   POST   /sessions                    create_session   201
//   GET    /sessions/{id}               get_state
//   DELETE /sessions/{id}
//   POST   /sessions/{id}/paint         paint_cells
//   POST   /sessions/{id}/splitline     run_splitline
//   POST   /sessions/{id}/anneal        run_anneal
//   GET    /sessions/{id}/metrics       get_metrics
//   GET    /sessions/{id}/electorate
//
// Errors: {"error": message, "status": code}.

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gerrylab/session.hpp"

namespace gerrylab {

inline constexpr int kDefaultPort = 8080;

/// GERRYLAB_PORT if set to a valid port, else 8080.
inline int service_port() {
  const char* env = std::getenv("GERRYLAB_PORT");
  if (!env || !*env) return kDefaultPort;
  char* end = nullptr;
  const long port = std::strtol(env, &end, 10);
  if (*end != '\0' || port < 1 || port > 65535) {
    throw DomainError(std::string("invalid GERRYLAB_PORT '") + env + "'");
  }
  return static_cast<int>(port);
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ApiError(400, std::string("malformed JSON: ") + e.what());
  }
}

template <class F>
void handle(httplib::Response& res, int ok_status, F&& f) {
  try {
    send_json(res, ok_status, f());
  } catch (const ApiError& e) {
    send_json(res, e.status(), {{"error", e.what()}, {"status", e.status()}});
  } catch (const std::exception& e) {
    send_json(res, 500, {{"error", e.what()}, {"status", 500}});
  }
}

}  // namespace detail

inline void install_routes(httplib::Server& server, SessionRegistry& registry) {
  using httplib::Request;
  using httplib::Response;
  server.Post("/sessions", [&registry](const Request& req, Response& res) {
    detail::handle(res, 201, [&] { return registry.create(detail::parse_body(req)); });
  });
  server.Get(R"(/sessions/([^/]+))", [&registry](const Request& req, Response& res) {
    detail::handle(res, 200, [&] { return registry.get_state(req.matches[1]); });
  });
  server.Delete(R"(/sessions/([^/]+))", [&registry](const Request& req, Response& res) {
    detail::handle(res, 200, [&] {
      registry.remove(req.matches[1]);
      return json{{"deleted", req.matches[1].str()}};
    });
  });
  server.Post(R"(/sessions/([^/]+)/paint)", [&registry](const Request& req, Response& res) {
    detail::handle(res, 200,
                   [&] { return registry.paint_cells(req.matches[1], detail::parse_body(req)); });
  });
  server.Post(R"(/sessions/([^/]+)/splitline)", [&registry](const Request& req, Response& res) {
    detail::handle(res, 200,
                   [&] { return registry.run_splitline(req.matches[1], detail::parse_body(req)); });
  });
  server.Post(R"(/sessions/([^/]+)/anneal)", [&registry](const Request& req, Response& res) {
    detail::handle(res, 200,
                   [&] { return registry.run_anneal(req.matches[1], detail::parse_body(req)); });
  });
  server.Get(R"(/sessions/([^/]+)/metrics)", [&registry](const Request& req, Response& res) {
    detail::handle(res, 200, [&] { return registry.get_metrics(req.matches[1]); });
  });
  server.Get(R"(/sessions/([^/]+)/electorate)", [&registry](const Request& req, Response& res) {
    detail::handle(res, 200, [&] { return registry.get_electorate(req.matches[1]); });
  });
}

}  // namespace gerrylab
