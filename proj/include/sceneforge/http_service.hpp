#pragma once

#include <string>

#include <httplib.h>

#include "sceneforge/catalog.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/service.hpp"

namespace sceneforge {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_session:
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::busy: return 409;
    case ErrorCode::parse:
    case ErrorCode::unknown_verb:
    case ErrorCode::grammar:
    case ErrorCode::empty_input:
    case ErrorCode::no_model_found:
    case ErrorCode::no_visualizable_object:
    case ErrorCode::hierarchy_cycle:
    case ErrorCode::invalid_argument:
      return 422;
    case ErrorCode::unknown_condition: return 400;
    default: return 500;
  }
}

inline OrderedJson error_json(ErrorCode code, const std::string& message, const std::optional<Span>& span = std::nullopt) {
  OrderedJson j{{"code", to_string(code)}, {"message", message}};
  if (span) j["span"] = {span->begin, span->end};
  return j;
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const OrderedJson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    send_json(res, http_status(e.code()), error_json(e.code(), e.what(), e.span()));
  } catch (const std::exception& e) {
    send_json(res, 500, error_json(ErrorCode::io, e.what()));
  }
}

inline Json request_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("bad JSON body: ") + e.what());
  }
}

}  // namespace detail

/// Registers the API routes on server. The manager must outlive it.
inline void install_routes(httplib::Server& server, SessionManager& sessions) {
  using detail::guarded;
  using detail::send_json;

  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  server.Post("/sessions", [&sessions](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      Json body;
      try {
        body = detail::request_body(req);
      } catch (const Error& e) {
        send_json(res, 400, error_json(e.code(), e.what()));
        return;
      }
      const std::string id = sessions.create(session_config_from_json(body));
      OrderedJson out{{"id", id}};
      out["state"] = sessions.scene(id);
      send_json(res, 201, out);
    });
  });

  server.Post(R"(/sessions/([^/]+)/text)", [&sessions](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      sessions.get(id);
      Json body;
      try {
        body = detail::request_body(req);
      } catch (const Error& e) {
        send_json(res, 400, error_json(e.code(), e.what()));
        return;
      }
      if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
        send_json(res, 400, error_json(ErrorCode::parse, "body must be {\"text\": string}"));
        return;
      }
      auto [r, state] = sessions.submit(id, body["text"].get<std::string>());
      OrderedJson out;
      out["parsed"] = r.parsed;
      out["state"] = state;
      out["warnings"] = OrderedJson::array();
      for (const auto& w : r.warnings) out["warnings"].push_back(w.message);
      out["changedIds"] = r.changedIds;
      out["degraded"] = state["degraded"];
      send_json(res, 200, out);
    });
  });

  server.Get(R"(/sessions/([^/]+)/scene)", [&sessions](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, sessions.scene(req.matches[1])); });
  });

  server.Get(R"(/sessions/([^/]+)/journal)", [&sessions](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, sessions.journal(req.matches[1])); });
  });

  server.Get(R"(/catalog/models/([^/]+))", [&sessions](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Model* m = sessions.context().catalog.find(req.matches[1]);
      if (!m) throw Error(ErrorCode::not_found, "unknown model '" + std::string(req.matches[1]) + "'");
      send_json(res, 200, model_to_json(*m));
    });
  });
}

}  // namespace sceneforge
