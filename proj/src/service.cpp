#include "cog/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <set>
#include <sstream>

namespace cog {

int http_status_for(const std::string& code) {
  static const std::set<std::string> not_found{"unknown-session", "unknown-target", "unknown-probe", "unknown-patch",
                                               "unknown-focus"};
  static const std::set<std::string> conflict{
      "review-in-progress", "duplicate-answer",  "task-open",       "no-open-task",    "invalid-transition",
      "duplicate-id",       "duplicate-edge",    "duplicate-task",  "approval-required", "no-pending-review",
      "stale-transfer",     "stale-motif",       "invariant-violation", "scope-mismatch", "probe-budget-exhausted"};
  if (not_found.count(code)) return 404;
  if (conflict.count(code)) return 409;
  if (code == "promotion-gate") return 403;
  if (code == "extractor-unavailable") return 503;
  return 400;
}

namespace {

void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const std::string& code, const std::string& detail) {
  send_json(res, Json{{"error", code}, {"detail", detail}}, http_status_for(code));
}

Json body_of(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = parse_json(req.body);
  if (!j.is_object()) throw Error("bad-request", "body must be a JSON object");
  return j;
}

int int_param(const httplib::Request& req, const char* key, int fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return std::stoi(req.get_param_value(key));
  } catch (const std::exception&) {
    throw Error("bad-request", std::string("bad integer for '") + key + "'");
  }
}

Json events_reply(const Session& session, const std::vector<EventRecord>& events) {
  return Json{{"events", events}, {"last_seq", session.last_seq()}, {"digest", session.digest()}};
}

EventKind edit_event_kind(const Json& edit) {
  const std::string kind = edit.value("kind", std::string());
  if (kind == "edge") return EventKind::edge_edit;
  if (kind == "motif") return EventKind::motif_edit;
  if (kind == "ops") {
    bool edges_only = edit.contains("ops") && edit.at("ops").is_array() && !edit.at("ops").empty();
    if (edges_only)
      for (const auto& op : edit.at("ops")) {
        const std::string name = op.value("op", std::string());
        if (name != "add_edge" && name != "set_strength") edges_only = false;
      }
    return edges_only ? EventKind::edge_edit : EventKind::concept_edit;
  }
  return EventKind::concept_edit;
}

}  // namespace

Service::Service(std::shared_ptr<SessionManager> sessions)
    : sessions_(std::move(sessions)), server_(std::make_unique<httplib::Server>()) {
  routes();
}

Service::~Service() { stop(); }

void Service::routes() {
  auto& s = *server_;
  auto guarded = [](auto handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, e.code(), e.what());
      } catch (const nlohmann::json::exception& e) {
        send_error(res, "bad-request", e.what());
      } catch (const std::exception& e) {
        send_error(res, "internal", e.what());
      }
    };
  };
  auto session_of = [this](const httplib::Request& req) { return sessions_->find(req.path_params.at("id")); };

  s.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    Json body = body_of(req);
    std::optional<RuntimeConfig> config;
    if (body.contains("config")) {
      Json merged = Json(sessions_->base_config());
      merged.merge_patch(body.at("config"));
      config = merged.get<RuntimeConfig>();
      config->clarification.validate();
    }
    auto session = config ? sessions_->create(config) : sessions_->create();
    send_json(res, Json{{"session", session->id()}}, 201);
  }));

  s.Post("/sessions/:id/turns", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    Json body = body_of(req);
    EventKind kind = body.contains("kind") ? parse_enum<EventKind>(body.at("kind").get<std::string>())
                                           : EventKind::utterance;
    if (!is_text_event(kind)) throw Error("bad-request", "turns carry utterance or text_* kinds");
    body.erase("kind");
    if (!body.contains("speaker")) body["speaker"] = "user";
    send_json(res, events_reply(*session, session->submit(kind, std::move(body))));
  }));

  s.Post("/sessions/:id/edits", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    Json body = body_of(req);
    const EventKind kind = edit_event_kind(body);
    send_json(res, events_reply(*session, session->submit(kind, std::move(body))));
  }));

  s.Post("/sessions/:id/probes/:pid/response",
         guarded([session_of](const httplib::Request& req, httplib::Response& res) {
           auto session = session_of(req);
           Json body = body_of(req);
           body["probe"] = req.path_params.at("pid");
           if (!body.contains("verdict")) throw Error("bad-request", "missing 'verdict'");
           send_json(res, events_reply(*session, session->submit(EventKind::probe_answered, std::move(body))));
         }));

  s.Post("/sessions/:id/patches/:pid/approve",
         guarded([session_of](const httplib::Request& req, httplib::Response& res) {
           auto session = session_of(req);
           Json body = body_of(req);
           Json payload{{"patch", req.path_params.at("pid")},
                        {"exclude", body.value("exclude", std::vector<std::string>())}};
           send_json(res, events_reply(*session, session->submit(EventKind::patch_approved, std::move(payload))));
         }));

  s.Post("/sessions/:id/patches/:pid/reject",
         guarded([session_of](const httplib::Request& req, httplib::Response& res) {
           auto session = session_of(req);
           Json payload{{"patch", req.path_params.at("pid")}};
           send_json(res, events_reply(*session, session->submit(EventKind::patch_rejected, std::move(payload))));
         }));

  s.Post("/sessions/:id/promote", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    Json body = body_of(req);
    if (!body.contains("origin")) body["origin"] = "user";
    send_json(res, events_reply(*session, session->submit(EventKind::promotion, std::move(body))));
  }));

  s.Post("/sessions/:id/transfers/:tid", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    Json body = body_of(req);
    Json payload{{"candidate", req.path_params.at("tid")}, {"adopt", body.value("adopt", false)}};
    send_json(res, events_reply(*session, session->submit(EventKind::transfer_uptake, std::move(payload))));
  }));

  s.Post("/sessions/:id/tasks", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    Json body = body_of(req);
    Json payload{{"task_id", body.value("task_id", std::string())}};
    send_json(res, events_reply(*session, session->submit(EventKind::task_start, std::move(payload))));
  }));

  s.Post("/sessions/:id/tasks/end", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    send_json(res, events_reply(*session, session->submit(EventKind::task_end, Json::object())));
  }));

  s.Get("/sessions/:id/state", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    SessionState state = session->state();
    send_json(res, Json{{"state", state}, {"digest", state_digest(state)}, {"last_seq", session->last_seq()}});
  }));

  s.Get("/sessions/:id/layout", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    SessionState state = session->state();
    send_json(res, state.layout ? Json(*state.layout) : Json(compute_layout(state.cognitive.graph)));
  }));

  s.Get("/sessions/:id/events", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    send_json(res, Json{{"events", session->events_since(int_param(req, "since", 0))}});
  }));

  s.Get("/sessions/:id/push", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    const int wait = std::clamp(int_param(req, "wait_ms", 0), 0, 30000);
    auto messages = session->push_since(int_param(req, "since", 0), std::chrono::milliseconds(wait));
    send_json(res, Json{{"messages", messages}});
  }));

  s.Get("/sessions/:id/archive", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    std::ostringstream out;
    write_archive(out, session->archive());
    res.set_content(out.str(), "application/x-ndjson");
  }));
}

int Service::start(const std::string& host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("bind-failure", host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void Service::run(const std::string& host, int port) {
  if (!server_->listen(host, port)) throw Error("bind-failure", host + ":" + std::to_string(port));
}

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace cog
