#include "likertopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "likertopt/error.hpp"

namespace likertopt {

namespace {

constexpr std::uint64_t kOracleSalt = 0x5851f42d4c957f2dULL;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::SchemaError, std::string("bad ") + what + " value '" + s + "'");
  }
}

long long parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::SchemaError, std::string("bad ") + what + " value '" + s + "'");
  }
}

bool parse_flag(const std::string& s, const char* what) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw Error(ErrorCode::SchemaError, std::string("bad ") + what + " flag '" + s + "'");
}

RunSummary summarize_final_gaps(const std::vector<std::vector<double>>& gaps, const std::string& function,
                                const std::string& algo) {
  RunSummary s;
  s.function = function;
  s.algo = algo;
  s.runs = static_cast<int>(gaps.size());
  if (gaps.empty()) return s;
  const std::size_t len = gaps.front().size();
  for (std::size_t k = 0; k < len; ++k) {
    double lo = gaps.front()[k];
    double hi = lo;
    double sum = 0.0;
    for (const auto& g : gaps) {
      lo = std::min(lo, g[k]);
      hi = std::max(hi, g[k]);
      sum += g[k];
    }
    s.iter.push_back(static_cast<int>(k) + 1);
    s.min.push_back(lo);
    s.max.push_back(hi);
    s.mean.push_back(sum / static_cast<double>(gaps.size()));
  }
  if (len > 0) {
    s.d_b = s.mean.back();
    s.d_w = s.max.back();
  }
  return s;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunTrace run_single(const BenchOptions& options, int run_id) {
  const auto& fn = benchmark(options.function);
  const auto problem = validate_problem(benchmark_problem(fn));

  RunTrace trace;
  trace.run_id = run_id;
  trace.seed = options.seed + static_cast<std::uint64_t>(run_id);

  EngineConfig config = options.engine;
  config.seed = trace.seed;

  OracleConfig oc;
  oc.sigma = options.oracle_sigma ? *options.oracle_sigma : default_oracle_sigma(fn);
  // The baseline gets exactly one outcome per query.
  oc.multi_prob = config.mode == Mode::AmPL ? options.multi_prob : 0.0;
  oc.seed = trace.seed ^ kOracleSalt;

  trace.log = run_loop(config, problem, make_query_oracle(fn, oc));
  double incumbent_gap = 0.0;
  for (const auto& row : trace.log.rows) {
    const double f = eval_benchmark(fn, row.point);
    trace.true_f.push_back(f);
    if (row.is_new_best) incumbent_gap = f - fn.optimum_value;
    trace.gap.push_back(incumbent_gap);
  }
  return trace;
}

std::vector<RunTrace> run_benchmark(const BenchOptions& options) {
  if (options.runs < 1) throw Error(ErrorCode::BadConfig, "runs must be positive");
  validate_config(options.engine);
  benchmark(options.function);

  std::vector<RunTrace> out(static_cast<std::size_t>(options.runs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int r = next++; r < options.runs; r = next++) {
      try {
        out[static_cast<std::size_t>(r)] = run_single(options, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(options.jobs, 1, options.runs);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::string trial_csv(const std::vector<RunTrace>& runs) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& run : runs) {
    for (std::size_t k = 0; k < run.log.rows.size(); ++k) {
      const auto& row = run.log.rows[k];
      std::string x;
      for (Eigen::Index d = 0; d < row.point.size(); ++d) {
        if (d > 0) x += ';';
        x += format_real(row.point[d]);
      }
      out += std::to_string(run.run_id) + ',' + std::to_string(run.seed) + ',' + std::to_string(row.iteration) + ',' +
             (row.is_init ? "1" : "0") + ',' + format_real(row.alpha) + ',' + x + ',' + format_real(run.true_f[k]) +
             ',' + format_real(run.gap[k]) + ',' + (row.is_new_best ? "1" : "0") + '\n';
    }
  }
  return out;
}

RunSummary summarize_runs(const std::vector<RunTrace>& runs, const std::string& function, const std::string& algo) {
  std::vector<std::vector<double>> gaps;
  for (const auto& r : runs) gaps.push_back(r.gap);
  for (const auto& g : gaps) {
    if (g.size() != gaps.front().size()) throw Error(ErrorCode::SchemaError, "runs have different lengths");
  }
  return summarize_final_gaps(gaps, function, algo);
}

RunSummary summarize(const std::vector<std::string>& csv_texts, const std::string& function, const std::string& algo) {
  std::map<long long, std::vector<std::pair<long long, double>>> by_run;
  for (const auto& text : csv_texts) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaError, "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw Error(ErrorCode::SchemaError, "unexpected CSV header '" + line + "'");
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto cells = split(line, ',');
      if (cells.size() != 9) {
        throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                                " fields, expected 9");
      }
      const long long run = parse_int(cells[0], "run_id");
      parse_int(cells[1], "seed");
      const long long iteration = parse_int(cells[2], "iteration");
      parse_flag(cells[3], "is_init");
      parse_real(cells[4], "alpha");
      for (const auto& c : split(cells[5], ';')) parse_real(c, "x");
      parse_real(cells[6], "true_f");
      const double gap = parse_real(cells[7], "gap");
      parse_flag(cells[8], "is_new_best");
      by_run[run].emplace_back(iteration, gap);
    }
  }
  if (by_run.empty()) throw Error(ErrorCode::SchemaError, "CSV has no data rows");

  std::vector<std::vector<double>> gaps;
  for (auto& [run, rows] : by_run) {
    std::sort(rows.begin(), rows.end());
    std::vector<double> g;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].first != static_cast<long long>(k) + 1) {
        throw Error(ErrorCode::SchemaError, "run " + std::to_string(run) + " has missing or repeated iterations");
      }
      g.push_back(rows[k].second);
    }
    if (!gaps.empty() && g.size() != gaps.front().size()) {
      throw Error(ErrorCode::SchemaError, "runs have different lengths");
    }
    gaps.push_back(std::move(g));
  }
  return summarize_final_gaps(gaps, function, algo);
}

nlohmann::json summary_to_json(const RunSummary& s) {
  return {{"function", s.function},
          {"algo", s.algo},
          {"runs", s.runs},
          {"d_b", s.d_b},
          {"d_w", s.d_w},
          {"series", {{"iter", s.iter}, {"min", s.min}, {"mean", s.mean}, {"max", s.max}}}};
}

}  // namespace likertopt
