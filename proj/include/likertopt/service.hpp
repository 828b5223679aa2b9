#pragma once

#include <chrono>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "likertopt/engine.hpp"

namespace httplib {
class Server;
}

namespace likertopt {

struct ServiceOptions {
  std::string bind = "127.0.0.1:8642";
  std::string data_dir = "likertopt-data";
  std::chrono::milliseconds propose_timeout{10000};

  /// Reads LIKERTOPT_BIND and LIKERTOPT_DATA_DIR when set.
  static ServiceOptions from_environment();
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

/// Sessions backed by one JSON-lines event log each. Every public call is
/// safe to use from many threads; calls on one session are serialized.
class SessionStore {
 public:
  /// Replays every *.jsonl log found in data_dir.
  explicit SessionStore(std::filesystem::path data_dir,
                        std::chrono::milliseconds propose_timeout = std::chrono::milliseconds(10000));
  ~SessionStore();

  ServiceResponse create(const std::string& body, const std::string& idempotency_key = "");
  ServiceResponse next_query(const std::string& session_id);
  ServiceResponse submit_feedback(const std::string& session_id, const std::string& query_id, const std::string& body);
  ServiceResponse best(const std::string& session_id);
  ServiceResponse history(const std::string& session_id);

  [[nodiscard]] std::vector<std::string> session_ids() const;
  /// Snapshot of a session's engine state, if the session exists.
  [[nodiscard]] std::optional<EngineState> engine_state(const std::string& session_id) const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& session_id) const;
  void append(Session& s, nlohmann::json event);

  std::filesystem::path data_dir_;
  std::chrono::milliseconds propose_timeout_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::string> by_idempotency_key_;
};

/// Rebuilds an engine from a session's event list. Throws SchemaError when
/// the events do not describe a consistent history.
Engine replay_events(const std::vector<nlohmann::json>& events);

void register_routes(httplib::Server& server, SessionStore& store);

/// Blocking HTTP server loop.
int run_service(const ServiceOptions& options);

}  // namespace likertopt
