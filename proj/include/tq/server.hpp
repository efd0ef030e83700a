#ifndef TQ_SERVER_HPP
#define TQ_SERVER_HPP

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>

#include <httplib.h>

#include "tq/analysis.hpp"
#include "tq/game.hpp"
#include "tq/io.hpp"

namespace tq {

/**
   Live game sessions keyed by id. The map is guarded by one mutex; each
   session carries its own mutex so that answers to one session are
   serialized while distinct sessions progress independently.
 */
class SessionStore {
 public:
  using Clock = std::chrono::steady_clock;

  struct Entry {
    Entry(GameSession s, Clock::time_point t)
        : session(std::move(s)), created(t), last_access(t) {}

    std::mutex mutex;
    GameSession session;
    Clock::time_point created;
    Clock::time_point last_access;
  };

  explicit SessionStore(std::chrono::seconds ttl = std::chrono::hours(1),
                        std::function<Clock::time_point()> now = Clock::now)
      : ttl_(ttl), now_(std::move(now)) {}

  std::shared_ptr<Entry> insert(GameSession session) {
    const auto t = now_();
    auto e = std::make_shared<Entry>(std::move(session), t);
    std::lock_guard lock(mutex_);
    sessions_[e->session.id()] = e;
    return e;
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return nullptr;
    return it->second;
  }

  void touch(Entry& e) { e.last_access = now_(); }

  /// Drops sessions idle for longer than the TTL; returns how many.
  std::size_t expire() {
    const auto t = now_();
    std::lock_guard lock(mutex_);
    std::size_t dropped = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      std::unique_lock entry_lock(it->second->mutex, std::try_to_lock);
      if (entry_lock.owns_lock() && t - it->second->last_access > ttl_) {
        entry_lock.unlock();
        it = sessions_.erase(it);
        ++dropped;
      } else {
        ++it;
      }
    }
    return dropped;
  }

  std::size_t size() {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

 private:
  std::chrono::seconds ttl_;
  std::function<Clock::time_point()> now_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

struct ServerConfig {
  std::optional<Distribution> default_dist;  // used by POST /api/sessions with an empty body
  std::string static_dir;                    // served at "/" when non-empty
  std::chrono::seconds session_ttl = std::chrono::hours(1);
  std::string cors_origin_pattern = R"(^https?://(localhost|127\.0\.0\.1|\[::1\])(:[0-9]+)?$)";
};

/// Session TTL from `TQ_SESSION_TTL_SECS`, else one hour.
inline std::chrono::seconds session_ttl_from_env() {
  if (const char* env = std::getenv("TQ_SESSION_TTL_SECS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return std::chrono::seconds(v);
  }
  return std::chrono::hours(1);
}

/**
   JSON API over HTTP/1.1:

     POST /api/sessions                 {labels, probs} | {preset}   -> 201 session
     POST /api/sessions/{id}/answers    {answer: "yes" | "no"}       -> 200 session
     GET  /api/sessions/{id}                                         -> 200 session
     GET  /api/analysis?dist=...        preset | JSON | "p1,p2,..."  -> 200 report
 */
class ApiServer {
 public:
  explicit ApiServer(ServerConfig config = {})
      : config_(std::move(config)), store_(config_.session_ttl), cors_(config_.cors_origin_pattern) {
    routes();
  }

  httplib::Server& http() noexcept { return http_; }
  SessionStore& store() noexcept { return store_; }

  /// Binds an ephemeral port on `host`; returns it, or -1.
  int bind_any_port(const std::string& host = "127.0.0.1") { return http_.bind_to_any_port(host); }
  bool listen_after_bind() { return http_.listen_after_bind(); }
  bool listen(const std::string& host, int port) { return http_.listen(host, port); }
  void stop() { http_.stop(); }

 private:
  static void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, std::string_view code,
                         const std::string& message) {
    send(res, status, json{{"error", code}, {"message", message}});
  }

  static void send_error(httplib::Response& res, const Error& e) {
    const int status = e.code() == ErrorCode::LimitExceeded ? 422 : 400;
    send_error(res, status, to_string(e.code()), e.what());
  }

  Distribution parse_dist_param(const std::string& raw) const {
    if (auto p = preset(raw)) return *p;
    if (!raw.empty() && raw.front() == '{') return distribution_from_json(json::parse(raw));
    std::vector<double> probs;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        probs.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw Error(ErrorCode::NonPositiveProb, "cannot parse probability '" + item + "'");
      }
    }
    return Distribution::from_probs(std::move(probs));
  }

  void routes() {
    http_.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      const auto origin = req.get_header_value("Origin");
      if (!origin.empty() && std::regex_match(origin, cors_)) {
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Vary", "Origin");
      }
    });
    http_.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    http_.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      store_.expire();
      try {
        std::optional<Distribution> dist;
        if (req.body.empty()) {
          dist = config_.default_dist;
          if (!dist) return send_error(res, 400, "EmptyInput", "request body required");
        } else {
          const auto body = json::parse(req.body);
          if (body.is_object() && body.contains("preset")) {
            if (!body["preset"].is_string() || !(dist = preset(body["preset"].get<std::string>())))
              return send_error(res, 400, "UnknownPreset", "unknown preset");
          } else {
            dist = distribution_from_json(body);
          }
        }
        auto entry = store_.insert(start_session(*dist));
        std::lock_guard lock(entry->mutex);
        send(res, 201, to_json(entry->session));
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const json::exception& e) {
        send_error(res, 400, "MalformedJson", e.what());
      }
    });

    http_.Post(R"(/api/sessions/([0-9a-f]+)/answers)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 store_.expire();
                 auto entry = store_.find(req.matches[1]);
                 if (!entry) return send_error(res, 404, "UnknownSession", "no such session");
                 Reply reply;
                 try {
                   const auto body = json::parse(req.body);
                   const auto a = body.at("answer").get<std::string>();
                   if (a == "yes") reply = Reply::Yes;
                   else if (a == "no") reply = Reply::No;
                   else return send_error(res, 400, "MalformedAnswer", "answer must be yes or no");
                 } catch (const json::exception&) {
                   return send_error(res, 400, "MalformedAnswer",
                                     "expected {\"answer\": \"yes\" | \"no\"}");
                 }
                 std::lock_guard lock(entry->mutex);
                 store_.touch(*entry);
                 if (!entry->session.active())
                   return send_error(res, 409, "SessionFinished", "session is finished");
                 entry->session = answer(entry->session, reply);
                 send(res, 200, to_json(entry->session));
               });

    http_.Get(R"(/api/sessions/([0-9a-f]+))",
              [this](const httplib::Request& req, httplib::Response& res) {
                store_.expire();
                auto entry = store_.find(req.matches[1]);
                if (!entry) return send_error(res, 404, "UnknownSession", "no such session");
                std::lock_guard lock(entry->mutex);
                store_.touch(*entry);
                send(res, 200, to_json(entry->session));
              });

    http_.Get("/api/analysis", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        std::optional<Distribution> dist;
        if (req.has_param("dist")) dist = parse_dist_param(req.get_param_value("dist"));
        else dist = config_.default_dist;
        if (!dist) return send_error(res, 400, "EmptyInput", "dist parameter required");
        send(res, 200, to_json(analyze(*dist)));
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const json::exception& e) {
        send_error(res, 400, "MalformedJson", e.what());
      }
    });

    if (!config_.static_dir.empty()) http_.set_mount_point("/", config_.static_dir);
  }

  ServerConfig config_;
  SessionStore store_;
  std::regex cors_;
  httplib::Server http_;
};

}  // namespace tq

#endif  // TQ_SERVER_HPP
