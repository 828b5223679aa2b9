#include "likertopt/engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "likertopt/acquisition.hpp"
#include "likertopt/error.hpp"

namespace likertopt {

namespace {

constexpr double kDuplicateTol = 1e-9;
constexpr double kPerturbRadius = 1e-3;
// Keeps the engine's stream apart from the Latin-hypercube seed.
constexpr std::uint64_t kStreamSalt = 0x9e3779b97f4a7c15ULL;

bool same_vectors(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size() || a[i] != b[i]) return false;
  }
  return true;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::AmPL ? "ampl" : "apl-rbf"; }

Mode mode_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "ampl") return Mode::AmPL;
  if (s == "apl-rbf" || s == "apl_rbf" || s == "apl") return Mode::APL_RBF;
  throw Error(ErrorCode::BadConfig, "unknown algorithm '" + name + "' (expected ampl or apl-rbf)");
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::Initializing: return "initializing";
    case Phase::AwaitingFeedback: return "awaiting_feedback";
    case Phase::ReadyToPropose: return "ready_to_propose";
    case Phase::Done: return "done";
  }
  return "unknown";
}

std::string to_string(QueryPurpose purpose) {
  return purpose == QueryPurpose::VsBest ? "vs_best" : "vs_previous";
}

void validate_config(const EngineConfig& c) {
  if (c.n_init < 2 || c.n_init >= c.n_max) throw Error(ErrorCode::BadConfig, "need 2 <= n_init < n_max");
  if (!(c.sigma1 > 0.0 && c.sigma1 < c.sigma2) || !std::isfinite(c.sigma2)) {
    throw Error(ErrorCode::BadConfig, "need 0 < sigma1 < sigma2");
  }
  if (!(c.alpha_bar > 0.0) || !std::isfinite(c.alpha_bar)) throw Error(ErrorCode::BadConfig, "alpha_bar must be positive");
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) throw Error(ErrorCode::BadConfig, "lambda must be positive");
  if (c.gamma_grid.empty()) throw Error(ErrorCode::BadConfig, "gamma_grid is empty");
  for (double g : c.gamma_grid) {
    if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorCode::BadConfig, "gamma_grid entries must be positive");
  }
  if (c.cv_k < 2) throw Error(ErrorCode::BadConfig, "cv_k must be at least 2");
  if (c.cv_period < 1) throw Error(ErrorCode::BadConfig, "cv_period must be at least 1");
  if (c.scan_points < 0 || c.refine_iters < 0) throw Error(ErrorCode::BadConfig, "search budget must be nonnegative");
}

nlohmann::json config_to_json(const EngineConfig& c) {
  return {{"mode", to_string(c.mode)}, {"n_init", c.n_init},         {"n_max", c.n_max},
          {"alpha_bar", c.alpha_bar},   {"sigma1", c.sigma1},         {"sigma2", c.sigma2},
          {"lambda", c.lambda},         {"gamma_grid", c.gamma_grid}, {"cv_k", c.cv_k},
          {"cv_period", c.cv_period},   {"scan_points", c.scan_points}, {"refine_iters", c.refine_iters},
          {"seed", c.seed}};
}

EngineConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "config must be an object");
  EngineConfig c;
  c.mode = mode_from_string(get_or<std::string>(j, "mode", to_string(c.mode)));
  c.n_init = get_or(j, "n_init", c.n_init);
  c.n_max = get_or(j, "n_max", c.n_max);
  c.alpha_bar = get_or(j, "alpha_bar", c.alpha_bar);
  c.sigma1 = get_or(j, "sigma1", c.sigma1);
  c.sigma2 = get_or(j, "sigma2", c.sigma2);
  c.lambda = get_or(j, "lambda", c.lambda);
  c.gamma_grid = get_or(j, "gamma_grid", c.gamma_grid);
  c.cv_k = get_or(j, "cv_k", c.cv_k);
  c.cv_period = get_or(j, "cv_period", c.cv_period);
  c.scan_points = get_or(j, "scan_points", c.scan_points);
  c.refine_iters = get_or(j, "refine_iters", c.refine_iters);
  c.seed = get_or(j, "seed", c.seed);
  return c;
}

bool operator==(const EngineState& a, const EngineState& b) {
  return same_vectors(a.samples, b.samples) && same_vectors(a.scaled, b.scaled) && a.records == b.records &&
         a.best_index == b.best_index && a.alpha == b.alpha && a.iteration == b.iteration &&
         a.proposals == b.proposals && a.init_cursor == b.init_cursor && a.pending == b.pending &&
         a.phase == b.phase && a.next_query_id == b.next_query_id && a.gamma == b.gamma && a.rng == b.rng;
}

bool promotes(const OutcomeSet& os) { return os.p_max() <= 0 && os.p_min() < 0; }

Engine::Engine(EngineConfig config, const ValidatedProblem& problem)
    : config_(std::move(config)), problem_(problem), scaled_problem_(problem.scaled()) {
  validate_config(config_);
  auto& s = state_;
  s.samples = latin_hypercube(problem_, config_.n_init, config_.seed);
  for (const auto& x : s.samples) s.scaled.push_back(scale_point(problem_, x).coords);
  s.iteration = config_.n_init;
  s.alpha = config_.alpha_bar;
  s.gamma = config_.gamma_grid.size() == 1 ? config_.gamma_grid.front() : 1.0;
  s.rng.seed(config_.seed ^ kStreamSalt);
  s.phase = Phase::Initializing;
  s.init_cursor = 1;
  open_queries_for(1);
}

void Engine::open_queries_for(int k) {
  auto& s = state_;
  const int prev = k - 1;
  if (config_.mode == Mode::AmPL && prev != s.best_index) {
    s.pending.push_back({s.next_query_id++, k, prev, QueryPurpose::VsPrevious});
  }
  s.pending.push_back({s.next_query_id++, k, s.best_index, QueryPurpose::VsBest});
}

std::optional<PreferenceQuery> Engine::find_query(std::uint64_t query_id) const {
  for (const auto& q : state_.pending) {
    if (q.query_id == query_id) return q;
  }
  return std::nullopt;
}

void Engine::ingest_feedback(std::uint64_t query_id, const OutcomeSet& os) {
  auto& s = state_;
  if (s.phase != Phase::Initializing && s.phase != Phase::AwaitingFeedback) {
    throw Error(ErrorCode::WrongPhase, "no feedback is expected in phase " + to_string(s.phase));
  }
  const auto it = std::find_if(s.pending.begin(), s.pending.end(),
                               [&](const PreferenceQuery& q) { return q.query_id == query_id; });
  if (it == s.pending.end()) throw Error(ErrorCode::UnknownQuery, "query " + std::to_string(query_id) + " is not pending");
  if (os.q() < 1) throw Error(ErrorCode::InvalidOutcomeSet, "empty outcome set");

  const PreferenceQuery query = *it;
  s.pending.erase(it);
  s.records.push_back({query.i, query.j, os, query.query_id});

  if (query.purpose == QueryPurpose::VsBest) {
    const bool promoted = promotes(os);
    if (promoted) s.best_index = query.i;
    // Init-phase promotions leave alpha alone; the baseline keeps it fixed.
    if (s.phase == Phase::AwaitingFeedback && config_.mode == Mode::AmPL) {
      s.alpha = update_alpha(s.alpha, config_.alpha_bar, promoted);
    }
  }
  if (s.pending.empty()) after_resolution();
}

void Engine::after_resolution() {
  auto& s = state_;
  if (s.phase == Phase::Initializing && s.init_cursor + 1 < config_.n_init) {
    s.init_cursor += 1;
    open_queries_for(s.init_cursor);
    return;
  }
  s.phase = s.iteration >= config_.n_max ? Phase::Done : Phase::ReadyToPropose;
}

Vector Engine::scan_acquisition(const SurrogateModel& model) {
  auto& s = state_;
  AcquisitionContext ctx;
  ctx.model = model;
  ctx.samples = s.scaled;
  ctx.delta_F = surrogate_range(model, s.scaled);
  ctx.alpha = config_.mode == Mode::AmPL ? s.alpha : config_.alpha_bar;
  ctx.alpha_bar = config_.alpha_bar;

  SearchBudget budget = SearchBudget::defaults(problem_.dim());
  if (config_.scan_points > 0) budget.scan_points = config_.scan_points;
  budget.refine_iters = config_.refine_iters;
  budget.seed = s.rng();
  return minimize_acquisition([&](const Vector& x) { return acquisition_eval(ctx, x); }, scaled_problem_, budget)
      .point;
}

Vector Engine::perturb_duplicate(Vector point) {
  auto& s = state_;
  auto is_duplicate = [&](const Vector& x) {
    return std::any_of(s.scaled.begin(), s.scaled.end(),
                       [&](const Vector& y) { return (x - y).norm() <= kDuplicateTol; });
  };
  const int n = problem_.dim();
  for (int attempt = 0; attempt < 1000 && is_duplicate(point); ++attempt) {
    // Uniform draw in the ball by rejection from the enclosing cube.
    Vector delta(n);
    do {
      for (int k = 0; k < n; ++k) delta[k] = 2.0 * unit_uniform(s.rng()) - 1.0;
    } while (delta.squaredNorm() > 1.0);
    Vector cand = point + kPerturbRadius * delta;
    if (project_feasible(scaled_problem_, point, cand)) point = cand;
  }
  return point;
}

Vector Engine::propose_next() {
  auto& s = state_;
  if (s.phase == Phase::Done || s.iteration >= config_.n_max) {
    throw Error(ErrorCode::BudgetExhausted, "sample budget n_max reached");
  }
  if (s.phase != Phase::ReadyToPropose) {
    throw Error(ErrorCode::WrongPhase, "cannot propose in phase " + to_string(s.phase));
  }

  FitParams params;
  params.sigma1 = config_.sigma1;
  params.sigma2 = config_.sigma2;
  params.lambda = config_.lambda;
  params.three_level = config_.mode == Mode::APL_RBF;
  if (s.proposals % config_.cv_period == 0) {
    const auto cv = cross_validate_gamma(s.scaled, s.records, config_.gamma_grid, config_.cv_k, params, s.rng(),
                                         s.gamma);
    s.gamma = cv.gamma;
  }
  params.gamma = s.gamma;
  const auto fit = fit_surrogate(s.scaled, s.records, params);

  Vector next = perturb_duplicate(scan_acquisition(fit.model));
  s.scaled.push_back(next);
  s.samples.push_back(unscale_point(problem_, ScaledPoint{next}));
  s.iteration += 1;
  s.proposals += 1;
  s.phase = Phase::AwaitingFeedback;
  open_queries_for(s.iteration - 1);
  return s.samples.back();
}

std::pair<int, Vector> Engine::current_best() const {
  return {state_.best_index, state_.samples[static_cast<std::size_t>(state_.best_index)]};
}

TrialLog run_loop(const EngineConfig& config, const ValidatedProblem& problem, const QueryOracle& oracle) {
  Engine engine(config, problem);
  TrialLog log;
  auto add_row = [&](int index, bool is_init, double alpha) {
    TrialRow row;
    row.iteration = index + 1;
    row.is_init = is_init;
    row.alpha = alpha;
    row.point = engine.state().samples[static_cast<std::size_t>(index)];
    log.rows.push_back(std::move(row));
  };
  for (int k = 0; k < config.n_init; ++k) add_row(k, true, engine.state().alpha);
  log.rows.front().is_new_best = true;

  while (engine.state().phase != Phase::Done) {
    while (!engine.pending_queries().empty()) {
      const auto q = engine.pending_queries().front();
      const auto& st = engine.state();
      const int before = st.best_index;
      const OutcomeSet os = oracle(st.samples[static_cast<std::size_t>(q.i)], st.samples[static_cast<std::size_t>(q.j)]);
      engine.ingest_feedback(q.query_id, os);
      if (engine.state().best_index != before) log.rows[static_cast<std::size_t>(q.i)].is_new_best = true;
    }
    if (engine.state().phase == Phase::ReadyToPropose) {
      const double alpha = config.mode == Mode::AmPL ? engine.state().alpha : config.alpha_bar;
      engine.propose_next();
      add_row(engine.state().iteration - 1, false, alpha);
    }
  }
  log.records = engine.state().records;
  log.best_index = engine.state().best_index;
  return log;
}

}  // namespace likertopt
