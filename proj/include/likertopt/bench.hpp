#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "likertopt/engine.hpp"
#include "likertopt/oracle.hpp"

namespace likertopt {

struct BenchOptions {
  std::string function = "camel6";
  EngineConfig engine;  // mode, n_init, n_max, alpha_bar, sigmas; seed is overwritten per run
  int runs = 20;
  std::uint64_t seed = 0;  // run r uses seed + r
  double multi_prob = 0.5;
  std::optional<double> oracle_sigma;  // default: range-relative sigma of the function
  int jobs = 1;
};

/// One seeded run with the true objective attached to every row.
struct RunTrace {
  int run_id = 0;
  std::uint64_t seed = 0;
  TrialLog log;
  std::vector<double> true_f;
  std::vector<double> gap;  // f(incumbent after this row) − f*
};

RunTrace run_single(const BenchOptions& options, int run_id);

/// All runs, spread over `jobs` threads, ordered by run_id.
std::vector<RunTrace> run_benchmark(const BenchOptions& options);

inline constexpr const char* kCsvHeader = "run_id,seed,iteration,is_init,alpha,x,true_f,gap,is_new_best";

/// Full CSV text, header included, runs in run_id order.
std::string trial_csv(const std::vector<RunTrace>& runs);

struct RunSummary {
  std::string function;
  std::string algo;
  int runs = 0;
  double d_b = 0.0;  // mean final gap
  double d_w = 0.0;  // worst final gap
  std::vector<int> iter;
  std::vector<double> min;
  std::vector<double> mean;
  std::vector<double> max;
};

RunSummary summarize_runs(const std::vector<RunTrace>& runs, const std::string& function, const std::string& algo);

/// Parses one or more CSV texts in the trial format. Throws SchemaError on
/// a wrong header, malformed rows or runs of unequal length.
RunSummary summarize(const std::vector<std::string>& csv_texts, const std::string& function = "",
                     const std::string& algo = "");

nlohmann::json summary_to_json(const RunSummary& summary);

/// printf("%.17g") rendering used throughout the CSV.
std::string format_real(double v);

}  // namespace likertopt
