#include "likertopt/service.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "likertopt/error.hpp"

namespace likertopt {

namespace {

using nlohmann::json;

json to_json(const Vector& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

std::string new_session_id() {
  static std::mutex m;
  static std::random_device rd;
  static std::mt19937_64 gen((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  std::lock_guard lock(m);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(gen()),
                static_cast<unsigned long long>(gen()));
  return buf;
}

ServiceResponse error_response(int status, std::string_view code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

ServiceResponse error_response(int status, const Error& e) { return error_response(status, to_string(e.code()), e.what()); }

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("body is not valid JSON: ") + e.what());
  }
}

json query_view(const Engine& engine, const PreferenceQuery& q) {
  const auto& st = engine.state();
  return {{"query_id", std::to_string(q.query_id)},
          {"a", to_json(st.samples[static_cast<std::size_t>(q.i)])},
          {"b", to_json(st.samples[static_cast<std::size_t>(q.j)])},
          {"a_index", q.i},
          {"b_index", q.j},
          {"purpose", to_string(q.purpose)},
          {"iteration", st.iteration},
          {"n_max", engine.config().n_max}};
}

std::optional<std::uint64_t> parse_query_id(const std::string& s) {
  if (s.empty() || s.size() > 19) return std::nullopt;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  return std::stoull(s);
}

}  // namespace

ServiceOptions ServiceOptions::from_environment() {
  ServiceOptions o;
  if (const char* bind = std::getenv("LIKERTOPT_BIND"); bind && *bind) o.bind = bind;
  if (const char* dir = std::getenv("LIKERTOPT_DATA_DIR"); dir && *dir) o.data_dir = dir;
  return o;
}

struct SessionStore::Session {
  std::string id;
  std::mutex mutex;
  std::optional<Engine> engine;
  std::vector<json> events;
  std::set<std::uint64_t> issued;
  std::optional<std::future<Engine>> proposing;
  std::filesystem::path log_path;
};

Engine replay_events(const std::vector<json>& events) {
  if (events.empty() || events.front().value("type", "") != "created") {
    throw Error(ErrorCode::SchemaError, "event log must start with a created event");
  }
  std::optional<Engine> engine;
  try {
    const auto& created = events.front();
    engine.emplace(config_from_json(created.at("config")), validate_problem(problem_from_json(created.at("problem"))));
    for (std::size_t k = 1; k < events.size(); ++k) {
      const auto& ev = events[k];
      const std::string type = ev.at("type").get<std::string>();
      if (type == "feedback") {
        engine->ingest_feedback(ev.at("query_id").get<std::uint64_t>(), outcome_set_from_json(ev.at("outcomes")));
      } else if (type == "proposal") {
        const Vector x = engine->propose_next();
        if (to_json(x) != ev.at("x") || engine->state().iteration - 1 != ev.at("index").get<int>()) {
          throw Error(ErrorCode::SchemaError, "replayed proposal differs from the logged one");
        }
      } else if (type == "query_issued") {
        const auto q = engine->find_query(ev.at("query_id").get<std::uint64_t>());
        if (!q) throw Error(ErrorCode::SchemaError, "logged query is not pending on replay");
      } else {
        throw Error(ErrorCode::SchemaError, "unknown event type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed event: ") + e.what());
  }
  return std::move(*engine);
}

SessionStore::SessionStore(std::filesystem::path data_dir, std::chrono::milliseconds propose_timeout)
    : data_dir_(std::move(data_dir)), propose_timeout_(propose_timeout) {
  std::filesystem::create_directories(data_dir_);
  std::vector<std::filesystem::path> logs;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") logs.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    auto s = std::make_shared<Session>();
    s->id = path.stem().string();
    s->log_path = path;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) s->events.push_back(json::parse(line));
    }
    s->engine.emplace(replay_events(s->events));
    for (const auto& ev : s->events) {
      if (ev["type"] == "query_issued") s->issued.insert(ev["query_id"].get<std::uint64_t>());
    }
    const auto key = s->events.front().value("idempotency_key", "");
    if (!key.empty()) by_idempotency_key_[key] = s->id;
    sessions_[s->id] = std::move(s);
  }
}

SessionStore::~SessionStore() {
  for (auto& [id, s] : sessions_) {
    std::lock_guard lock(s->mutex);
    if (s->proposing) s->proposing->wait();
  }
}

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  const auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : it->second;
}

void SessionStore::append(Session& s, json event) {
  std::ofstream out(s.log_path, std::ios::app);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::BadConfig, "cannot write event log " + s.log_path.string());
  s.events.push_back(std::move(event));
}

std::vector<std::string> SessionStore::session_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  return ids;
}

std::optional<EngineState> SessionStore::engine_state(const std::string& session_id) const {
  const auto s = find(session_id);
  if (!s) return std::nullopt;
  std::lock_guard lock(s->mutex);
  return s->engine->state();
}

ServiceResponse SessionStore::create(const std::string& body, const std::string& idempotency_key) {
  json request;
  ProblemSpec problem;
  EngineConfig config;
  std::optional<Engine> engine;
  std::string key = idempotency_key;
  try {
    request = parse_body(body);
    if (!request.is_object() || !request.contains("problem")) {
      throw Error(ErrorCode::SchemaError, "body needs a \"problem\" object");
    }
    if (key.empty() && request.contains("idempotency_key")) key = request["idempotency_key"].get<std::string>();
    problem = problem_from_json(request["problem"]);
    config = config_from_json(request.value("config", json::object()));
    engine.emplace(config, validate_problem(problem));
  } catch (const Error& e) {
    return error_response(400, e);
  } catch (const json::exception& e) {
    return error_response(400, "SchemaError", e.what());
  }

  std::unique_lock lock(mutex_);
  if (!key.empty()) {
    if (const auto it = by_idempotency_key_.find(key); it != by_idempotency_key_.end()) {
      return {200, {{"session_id", it->second}, {"created", false}}};
    }
  }
  auto s = std::make_shared<Session>();
  s->id = new_session_id();
  s->log_path = data_dir_ / (s->id + ".jsonl");
  s->engine = std::move(engine);
  json created{{"type", "created"}, {"session_id", s->id}, {"problem", problem_to_json(problem)},
               {"config", config_to_json(config)}};
  if (!key.empty()) created["idempotency_key"] = key;
  append(*s, std::move(created));
  if (!key.empty()) by_idempotency_key_[key] = s->id;
  const int n = problem.n;
  sessions_[s->id] = s;
  return {201, {{"session_id", s->id}, {"created", true}, {"dim", n}, {"n_init", config.n_init}, {"n_max", config.n_max}}};
}

ServiceResponse SessionStore::next_query(const std::string& session_id) {
  const auto s = find(session_id);
  if (!s) return error_response(404, "NotFound", "unknown session");
  std::lock_guard lock(s->mutex);

  if (s->engine->state().phase == Phase::ReadyToPropose) {
    if (!s->proposing) {
      // Work on a copy so a slow proposal never leaves the session half-updated.
      s->proposing = std::async(std::launch::async, [snapshot = *s->engine]() mutable {
        snapshot.propose_next();
        return snapshot;
      });
    }
    if (s->proposing->wait_for(propose_timeout_) != std::future_status::ready) {
      return {200, {{"propose_pending", true}}};
    }
    auto fut = std::move(*s->proposing);
    s->proposing.reset();
    try {
      s->engine.emplace(fut.get());
    } catch (const Error& e) {
      return error_response(500, e);
    }
    const auto& st = s->engine->state();
    append(*s, {{"type", "proposal"}, {"index", st.iteration - 1}, {"x", to_json(st.samples.back())}});
  }

  const auto& st = s->engine->state();
  if (st.phase == Phase::Done) return {200, {{"done", true}}};
  if (st.pending.empty()) return error_response(500, "WrongPhase", "no query is pending");
  const auto& q = st.pending.front();
  if (s->issued.insert(q.query_id).second) {
    append(*s, {{"type", "query_issued"}, {"query_id", q.query_id}, {"i", q.i}, {"j", q.j}, {"purpose", to_string(q.purpose)}});
  }
  return {200, query_view(*s->engine, q)};
}

ServiceResponse SessionStore::submit_feedback(const std::string& session_id, const std::string& query_id,
                                              const std::string& body) {
  const auto s = find(session_id);
  if (!s) return error_response(404, "NotFound", "unknown session");
  std::lock_guard lock(s->mutex);

  const auto qid = parse_query_id(query_id);
  if (!qid) return error_response(404, "UnknownQuery", "unknown query");
  if (!s->engine->find_query(*qid)) {
    const auto& recs = s->engine->state().records;
    const bool answered = std::any_of(recs.begin(), recs.end(), [&](const PreferenceRecord& r) { return r.query_id == *qid; });
    if (answered) return error_response(409, "AlreadyAnswered", "query " + query_id + " was already answered");
    return error_response(404, "UnknownQuery", "unknown query");
  }

  std::optional<OutcomeSet> os;
  try {
    os = outcome_set_from_json(parse_body(body));
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::SchemaError ? 400 : 422;
    auto r = error_response(status, e);
    r.body["rule"] = to_string(e.code());
    return r;
  }
  try {
    s->engine->ingest_feedback(*qid, *os);
  } catch (const Error& e) {
    return error_response(409, e);
  }
  append(*s, {{"type", "feedback"}, {"query_id", *qid}, {"outcomes", outcome_set_to_json(*os)["outcomes"]}});
  const auto& st = s->engine->state();
  return {200, {{"accepted", true}, {"phase", to_string(st.phase)}, {"iteration", st.iteration}}};
}

ServiceResponse SessionStore::best(const std::string& session_id) {
  const auto s = find(session_id);
  if (!s) return error_response(404, "NotFound", "unknown session");
  std::lock_guard lock(s->mutex);
  const auto [index, x] = s->engine->current_best();
  const auto& st = s->engine->state();
  return {200,
          {{"index", index}, {"x", to_json(x)}, {"iteration", st.iteration}, {"n_max", s->engine->config().n_max},
           {"phase", to_string(st.phase)}}};
}

ServiceResponse SessionStore::history(const std::string& session_id) {
  const auto s = find(session_id);
  if (!s) return error_response(404, "NotFound", "unknown session");
  std::lock_guard lock(s->mutex);
  return {200, {{"session_id", s->id}, {"events", s->events}}};
}

void register_routes(httplib::Server& server, SessionStore& store) {
  auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Post("/v1/sessions", [&store, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, store.create(req.body, req.get_header_value("Idempotency-Key")));
  });
  server.Get(R"(/v1/sessions/([^/]+)/queries/next)", [&store, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, store.next_query(req.matches[1]));
  });
  server.Post(R"(/v1/sessions/([^/]+)/queries/([^/]+)/feedback)",
              [&store, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, store.submit_feedback(req.matches[1], req.matches[2], req.body));
              });
  server.Get(R"(/v1/sessions/([^/]+)/best)", [&store, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, store.best(req.matches[1]));
  });
  server.Get(R"(/v1/sessions/([^/]+)/history)", [&store, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, store.history(req.matches[1]));
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(json{{"error", "Internal"}, {"message", what}}.dump(), "application/json");
  });
}

int run_service(const ServiceOptions& options) {
  const auto colon = options.bind.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::BadConfig, "bind address must be host:port");
  const std::string host = options.bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(options.bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadConfig, "bad port in '" + options.bind + "'");
  }
  SessionStore store(options.data_dir, options.propose_timeout);
  httplib::Server server;
  register_routes(server, store);
  std::cout << "listening on " << host << ":" << port << " (data in " << options.data_dir << ")" << std::endl;
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << options.bind << "\n";
    return 1;
  }
  return 0;
}

}  // namespace likertopt
