#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "likertopt/global_min.hpp"
#include "likertopt/preference.hpp"
#include "likertopt/problem.hpp"
#include "likertopt/surrogate.hpp"

namespace likertopt {

enum class Mode { AmPL, APL_RBF };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct EngineConfig {
  Mode mode = Mode::AmPL;
  int n_init = 10;
  int n_max = 30;
  double alpha_bar = 0.1;
  double sigma1 = 0.033;
  double sigma2 = 0.5;
  double lambda = 1.0;
  std::vector<double> gamma_grid = kDefaultGammaGrid;
  int cv_k = 5;
  int cv_period = 10;
  int scan_points = 0;  // 0 picks 2000·n
  int refine_iters = 200;
  std::uint64_t seed = 0;
};

/// Throws BadConfig when the configuration breaks an invariant.
void validate_config(const EngineConfig& config);

nlohmann::json config_to_json(const EngineConfig& config);
/// Missing keys keep their defaults.
EngineConfig config_from_json(const nlohmann::json& j);

enum class Phase { Initializing, AwaitingFeedback, ReadyToPropose, Done };
enum class QueryPurpose { VsPrevious, VsBest };

std::string to_string(Phase phase);
std::string to_string(QueryPurpose purpose);

/// Asks how sample i compares with sample j; i is always the newer sample.
struct PreferenceQuery {
  std::uint64_t query_id = 0;
  int i = 0;
  int j = 0;
  QueryPurpose purpose = QueryPurpose::VsBest;
  friend bool operator==(const PreferenceQuery&, const PreferenceQuery&) = default;
};

struct EngineState {
  std::vector<Vector> samples;  // original units
  std::vector<Vector> scaled;   // same points in [-1, 1]^n
  std::vector<PreferenceRecord> records;
  int best_index = 0;
  double alpha = 0.0;
  int iteration = 0;  // N, the number of samples
  int proposals = 0;
  int init_cursor = 1;  // init sample whose queries are open
  std::vector<PreferenceQuery> pending;
  Phase phase = Phase::Initializing;
  std::uint64_t next_query_id = 1;
  double gamma = 1.0;
  std::mt19937_64 rng;

  friend bool operator==(const EngineState& a, const EngineState& b);
};

/// Outcome set contains a strictly negative value and nothing positive.
bool promotes(const OutcomeSet& os);

/// One preference-driven optimization run. Not thread-safe; separate
/// instances are independent.
class Engine {
 public:
  /// Draws the Latin-hypercube initial design and opens the first
  /// initialization queries.
  Engine(EngineConfig config, const ValidatedProblem& problem);

  [[nodiscard]] const EngineConfig& config() const noexcept { return config_; }
  [[nodiscard]] const ValidatedProblem& problem() const noexcept { return problem_; }
  [[nodiscard]] const EngineState& state() const noexcept { return state_; }

  [[nodiscard]] const std::vector<PreferenceQuery>& pending_queries() const noexcept { return state_.pending; }
  [[nodiscard]] std::optional<PreferenceQuery> find_query(std::uint64_t query_id) const;

  void ingest_feedback(std::uint64_t query_id, const OutcomeSet& os);

  /// Fits the surrogate, minimizes the acquisition and appends the
  /// minimizer as a new sample. Returns it in original units.
  Vector propose_next();

  [[nodiscard]] std::pair<int, Vector> current_best() const;

 private:
  void open_queries_for(int k);
  void after_resolution();
  Vector scan_acquisition(const SurrogateModel& model);
  Vector perturb_duplicate(Vector point);

  EngineConfig config_;
  ValidatedProblem problem_;
  ValidatedProblem scaled_problem_;
  EngineState state_;
};

struct TrialRow {
  int iteration = 0;  // 1-based sample number
  bool is_init = false;
  double alpha = 0.0;  // exploration weight used to propose the sample
  Vector point;
  bool is_new_best = false;  // sample became the incumbent when its queries resolved
};

struct TrialLog {
  std::vector<TrialRow> rows;
  std::vector<PreferenceRecord> records;
  int best_index = 0;
};

using QueryOracle = std::function<OutcomeSet(const Vector& a, const Vector& b)>;

/// Runs initialization, feedback and proposals until the budget is spent.
TrialLog run_loop(const EngineConfig& config, const ValidatedProblem& problem, const QueryOracle& oracle);

}  // namespace likertopt
