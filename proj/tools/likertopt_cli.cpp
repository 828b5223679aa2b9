#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "likertopt/bench.hpp"
#include "likertopt/error.hpp"
#include "likertopt/service.hpp"

using namespace likertopt;

namespace {

struct TableRow {
  int n_init;
  int n_max;
  double alpha_bar;
  double sigma1;
  double sigma2;
};

// Per-benchmark defaults for the experiment settings.
TableRow defaults_for(const std::string& function) {
  if (function == "ackley2") return {40, 120, 0.1, 0.008, 0.2};
  if (function == "rosenbrock8") return {27, 80, 0.1, 0.013, 2.0};
  return {10, 30, 0.1, 0.033, 0.5};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SchemaError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::BadConfig, "cannot write " + path.string());
  out << text;
}

void print_summary(const RunSummary& s) {
  std::printf("%-12s %-8s runs=%-3d d_b=%.4f d_w=%.4f\n", s.function.c_str(), s.algo.c_str(), s.runs, s.d_b, s.d_w);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-based black-box optimization with Likert-scale feedback"};
  app.require_subcommand(1);

  // bench
  auto* bench = app.add_subcommand("bench", "seeded benchmark runs with a synthetic decision maker");
  std::string function;
  std::string algo = "ampl";
  BenchOptions opts;
  std::optional<int> n_init;
  std::optional<int> n_max;
  std::optional<double> alpha_bar;
  std::optional<double> sigma1;
  std::optional<double> sigma2;
  std::optional<double> oracle_sigma;
  std::string out_dir = ".";
  bench->add_option("--function", function, "camel6, ackley2 or rosenbrock8")->required();
  bench->add_option("--algo", algo, "ampl, apl-rbf or both")->capture_default_str();
  bench->add_option("--runs", opts.runs, "number of seeded runs")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--n-init", n_init, "initial Latin-hypercube samples");
  bench->add_option("--n-max", n_max, "total sample budget");
  bench->add_option("--alpha-bar", alpha_bar, "exploration weight cap");
  bench->add_option("--sigma1", sigma1, "inner surrogate tolerance");
  bench->add_option("--sigma2", sigma2, "outer surrogate tolerance");
  bench->add_option("--seed", opts.seed, "base seed; run r uses seed + r")->capture_default_str();
  bench->add_option("--out", out_dir, "output directory")->capture_default_str();
  bench->add_option("--multi-prob", opts.multi_prob, "chance of a two-outcome answer")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--oracle-sigma", oracle_sigma, "perception threshold of the synthetic decision maker");
  bench->add_option("--jobs", opts.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  // summarize
  auto* summ = app.add_subcommand("summarize", "d_b, d_w and gap bands from trial CSV files");
  std::vector<std::string> csv_files;
  std::string label_function;
  std::string label_algo;
  std::string summary_out;
  summ->add_option("files", csv_files, "trial CSV files")->required()->check(CLI::ExistingFile);
  summ->add_option("--function", label_function, "function label for the JSON");
  summ->add_option("--algo", label_algo, "algorithm label for the JSON");
  summ->add_option("--out", summary_out, "write the summary JSON here instead of stdout");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP session service for human decision makers");
  ServiceOptions service_opts = ServiceOptions::from_environment();
  serve->add_option("--bind", service_opts.bind, "host:port")->capture_default_str();
  serve->add_option("--data-dir", service_opts.data_dir, "event log directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      const auto row = defaults_for(function);
      opts.function = function;
      opts.engine.n_init = n_init.value_or(row.n_init);
      opts.engine.n_max = n_max.value_or(row.n_max);
      opts.engine.alpha_bar = alpha_bar.value_or(row.alpha_bar);
      opts.engine.sigma1 = sigma1.value_or(row.sigma1);
      opts.engine.sigma2 = sigma2.value_or(row.sigma2);
      opts.oracle_sigma = oracle_sigma;
      std::vector<Mode> modes;
      if (algo == "both") {
        modes = {Mode::AmPL, Mode::APL_RBF};
      } else {
        modes = {mode_from_string(algo)};
      }
      std::filesystem::create_directories(out_dir);
      for (Mode mode : modes) {
        opts.engine.mode = mode;
        const auto runs = run_benchmark(opts);
        const std::string stem = function + "_" + to_string(mode);
        write_file(std::filesystem::path(out_dir) / (stem + ".csv"), trial_csv(runs));
        const auto summary = summarize_runs(runs, function, to_string(mode));
        write_file(std::filesystem::path(out_dir) / (stem + "_summary.json"), summary_to_json(summary).dump(2) + "\n");
        print_summary(summary);
      }
      return 0;
    }
    if (*summ) {
      std::vector<std::string> texts;
      for (const auto& f : csv_files) texts.push_back(read_file(f));
      const auto summary = summarize(texts, label_function, label_algo);
      const std::string json = summary_to_json(summary).dump(2) + "\n";
      if (summary_out.empty()) {
        std::cout << json;
      } else {
        write_file(summary_out, json);
        print_summary(summary);
      }
      return 0;
    }
    if (*serve) return run_service(service_opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
