#pragma once

// HTTP+JSON front end for SessionManager.
//
//   POST /sessions                      {"n": 2, "rule": {...}}      -> {"id": ...}
//   POST /sessions/{id}/bids            observation                   -> verdict + committed
//   POST /sessions/{id}/whatif          observation [+ "rule"]        -> verdict + mu effect
//   GET  /sessions/{id}/analysis                                      -> analysis
//   GET  /sessions/{id}/valuations[?bounds=<json>]                    -> {"min", "max"?}
//   POST /sessions/{id}/withdrawals     {"rounds": [...]}              -> analysis
//
// Errors are {"error": code, "detail": text}.

#include <map>
#include <optional>
#include <regex>
#include <string>

#include "httplib.h"
#include "rpgraph/io.hpp"
#include "rpgraph/service.hpp"

namespace rpgraph::http {

using io::Json;

struct Response {
  int status = 200;
  Json body;
};

inline int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_session:
    case ErrorCode::unknown_round: return 404;
    case ErrorCode::stale_round:
    case ErrorCode::duplicate_round:
    case ErrorCode::empty_input: return 409;
    case ErrorCode::internal: return 500;
    default: return 400;
  }
}

inline Response error_response(int status, std::string_view code, const std::string& detail) {
  return {status, Json{{"error", std::string(code)}, {"detail", detail}}};
}

class Api {
 public:
  explicit Api(service::SessionManager& sessions) : sessions_(sessions) {}

  /// Transport-independent dispatch; `query` holds decoded parameters.
  Response handle(const std::string& method, const std::string& path, const std::map<std::string, std::string>& query,
                  const std::string& body) {
    try {
      return route(method, path, query, body);
    } catch (const Error& e) {
      return error_response(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const Json::exception& e) {
      return error_response(400, "parse_error", e.what());
    } catch (const std::exception& e) {
      return error_response(500, "internal", e.what());
    }
  }

 private:
  static Json parse_body(const std::string& body) {
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded()) throw ParseError(0, "request body is not valid JSON");
    return j;
  }

  static Json whatif_json(const service::WhatIfResult& r, const BiddingGraph* g) {
    Json out = io::to_json(r.verdict, g);
    out["mu_before"] = io::to_json(r.mu_before);
    out["mu_after"] = io::to_json(r.mu_after);
    out["delta_mu"] = io::to_json(r.delta_mu());
    return out;
  }

  Response route(const std::string& method, const std::string& path, const std::map<std::string, std::string>& query,
                 const std::string& body) {
    static const std::regex session_path(R"(^/sessions/([A-Za-z0-9_-]+)/(bids|whatif|analysis|valuations|withdrawals)$)");

    if (path == "/sessions") {
      if (method != "POST") return error_response(405, "method_not_allowed", method + " " + path);
      const Json req = parse_body(body.empty() ? "{}" : body);
      if (!req.contains("n") || !req["n"].is_number_integer() || req["n"].get<long>() < 1)
        fail(ErrorCode::invalid_argument, "'n' must be a positive integer");
      const RuleConfig cfg = req.contains("rule") ? io::rule_config_from_json(req["rule"]) : RuleConfig{};
      const std::string id = sessions_.create(req["n"].get<std::size_t>(), cfg);
      return {201, Json{{"id", id}, {"n", req["n"]}, {"rule", io::to_json(cfg)}}};
    }

    std::smatch m;
    if (!std::regex_match(path, m, session_path)) return error_response(404, "not_found", "no route for " + path);
    const std::string id = m[1];
    const std::string action = m[2];
    const bool post = method == "POST";
    const bool get = method == "GET";

    if (action == "bids" && post) {
      const auto obs = io::observation_from_json(parse_body(body));
      const auto r = sessions_.commit(id, obs);
      Json out = io::to_json(r.verdict, &r.graph);
      out["committed"] = r.committed;
      return {200, std::move(out)};
    }
    if (action == "whatif" && post) {
      const Json req = parse_body(body);
      const Json& obs_json = req.contains("observation") ? req["observation"] : req;
      std::optional<RuleConfig> cfg;
      if (req.contains("rule")) cfg = io::rule_config_from_json(req["rule"]);
      const auto r = sessions_.whatif(id, io::observation_from_json(obs_json), cfg);
      return {200, whatif_json(r, &r.graph)};
    }
    if (action == "analysis" && get) return {200, sessions_.analysis(id)};
    if (action == "valuations" && get) {
      std::optional<Json> bounds;
      if (auto it = query.find("bounds"); it != query.end()) bounds = parse_body(it->second);
      return {200, sessions_.valuations(id, bounds)};
    }
    if (action == "withdrawals" && post) {
      const Json req = parse_body(body);
      if (!req.contains("rounds") || !req["rounds"].is_array()) throw ParseError(0, "'rounds' must be an array");
      return {200, sessions_.withdraw(id, req["rounds"].get<std::vector<RoundId>>())};
    }
    return error_response(405, "method_not_allowed", method + " " + path);
  }

  service::SessionManager& sessions_;
};

/// Mounts the API on an httplib server (all routes, any method).
inline void mount(httplib::Server& server, Api& api) {
  auto handler = [&api](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query[k] = v;
    const Response r = api.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/sessions.*)", handler);
  server.Post(R"(/sessions.*)", handler);
  server.Put(R"(/sessions.*)", handler);
  server.Delete(R"(/sessions.*)", handler);
}

}  // namespace rpgraph::http
