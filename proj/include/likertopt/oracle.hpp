#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "likertopt/engine.hpp"
#include "likertopt/preference.hpp"
#include "likertopt/problem.hpp"

namespace likertopt {

struct BenchmarkFunction {
  std::string name;
  int n = 0;
  Vector lower;
  Vector upper;
  double (*evaluate)(const Vector&) = nullptr;
  double optimum_value = 0.0;
  std::vector<Vector> optimizers;
};

double camel6(const Vector& x);
double ackley(const Vector& x);
double rosenbrock(const Vector& x);

/// camel6, ackley2 or rosenbrock8. Throws UnknownFunction otherwise.
const BenchmarkFunction& benchmark(const std::string& name);
std::vector<std::string> benchmark_names();

/// Box of the benchmark as a problem without linear constraints.
ProblemSpec benchmark_problem(const BenchmarkFunction& fn);

/// Throws DimensionMismatch or OutOfBounds (1e-9 slack) before evaluating.
double eval_benchmark(const BenchmarkFunction& fn, const Vector& x);

/// Five-level answer for "how does f1 compare with f2" with perception
/// threshold sigma. 0 only on exact equality.
LikertValue true_likert(double f1, double f2, double sigma);

struct OracleConfig {
  double sigma = 1.0;
  double multi_prob = 0.5;
  std::array<double, 4> certainty_weights{1.0, 1.0, 1.0, 1.0};  // relative odds of c = 1..4
  std::uint64_t seed = 0;
};

/// Either the singleton {p_true} or p_true plus one adjacent level of the
/// same sign side. Always valid and always contains p_true.
OutcomeSet emit_outcome_set(LikertValue p_true, const OracleConfig& cfg, std::mt19937_64& rng);

/// 0.1 × (max − min) of f over 1000 seeded uniform draws in the box.
double default_oracle_sigma(const BenchmarkFunction& fn, std::uint64_t seed = 0);

/// Stateful answerer: each call consumes the oracle's own random stream.
QueryOracle make_query_oracle(const BenchmarkFunction& fn, const OracleConfig& cfg);

}  // namespace likertopt
