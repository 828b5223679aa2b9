#include "likertopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "likertopt/error.hpp"
#include "likertopt/global_min.hpp"

namespace likertopt {

double camel6(const Vector& x) {
  const double a = x[0] * x[0];
  const double b = x[1] * x[1];
  return (4.0 - 2.1 * a + a * a / 3.0) * a + x[0] * x[1] + (-4.0 + 4.0 * b) * b;
}

double ackley(const Vector& x) {
  const double n = static_cast<double>(x.size());
  double cos_sum = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) cos_sum += std::cos(2.0 * std::numbers::pi * x[k]);
  return -20.0 * std::exp(-0.2 * std::sqrt(x.squaredNorm() / n)) - std::exp(cos_sum / n) + 20.0 + std::numbers::e;
}

double rosenbrock(const Vector& x) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k) {
    const double u = x[k + 1] - x[k] * x[k];
    const double v = x[k] - 1.0;
    sum += 100.0 * u * u + v * v;
  }
  return sum;
}

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

std::vector<BenchmarkFunction> make_registry() {
  std::vector<BenchmarkFunction> out;
  BenchmarkFunction camel{"camel6", 2, vec2(-2.0, -1.0), vec2(2.0, 1.0), camel6, -1.0316284534898774, {}};
  camel.optimizers = {vec2(0.08984201368301331, -0.7126564032704135), vec2(-0.08984201368301331, 0.7126564032704135)};
  out.push_back(std::move(camel));
  out.push_back({"ackley2", 2, Vector::Constant(2, -5.0), Vector::Constant(2, 5.0), ackley, 0.0, {Vector::Zero(2)}});
  out.push_back(
      {"rosenbrock8", 8, Vector::Constant(8, -30.0), Vector::Constant(8, 30.0), rosenbrock, 0.0, {Vector::Ones(8)}});
  return out;
}

const std::vector<BenchmarkFunction>& registry() {
  static const std::vector<BenchmarkFunction> r = make_registry();
  return r;
}

int draw_certainty(const std::array<double, 4>& weights, int max_level, std::mt19937_64& rng) {
  double total = 0.0;
  for (int c = 0; c < max_level; ++c) total += weights[static_cast<std::size_t>(c)];
  if (!(total > 0.0)) throw Error(ErrorCode::BadConfig, "certainty weights must put mass on the allowed levels");
  double u = unit_uniform(rng()) * total;
  for (int c = 0; c < max_level; ++c) {
    u -= weights[static_cast<std::size_t>(c)];
    if (u < 0.0) return c + 1;
  }
  // Rounding left a sliver; take the last level with mass.
  for (int c = max_level; c >= 1; --c) {
    if (weights[static_cast<std::size_t>(c - 1)] > 0.0) return c;
  }
  return max_level;
}

}  // namespace

const BenchmarkFunction& benchmark(const std::string& name) {
  for (const auto& fn : registry()) {
    if (fn.name == name) return fn;
  }
  throw Error(ErrorCode::UnknownFunction, "unknown benchmark '" + name + "'");
}

std::vector<std::string> benchmark_names() {
  std::vector<std::string> names;
  for (const auto& fn : registry()) names.push_back(fn.name);
  return names;
}

ProblemSpec benchmark_problem(const BenchmarkFunction& fn) { return {fn.n, fn.lower, fn.upper, {}}; }

double eval_benchmark(const BenchmarkFunction& fn, const Vector& x) {
  if (x.size() != fn.n) throw Error(ErrorCode::DimensionMismatch, fn.name + " expects " + std::to_string(fn.n) + " coordinates");
  for (int k = 0; k < fn.n; ++k) {
    if (!std::isfinite(x[k])) throw Error(ErrorCode::NonFinite, "point has a non-finite coordinate");
    if (x[k] < fn.lower[k] - 1e-9 || x[k] > fn.upper[k] + 1e-9) {
      throw Error(ErrorCode::OutOfBounds, "point lies outside the " + fn.name + " box");
    }
  }
  return fn.evaluate(x);
}

LikertValue true_likert(double f1, double f2, double sigma) {
  if (f1 < f2 - sigma) return LikertValue::make(-2);
  if (f1 < f2) return LikertValue::make(-1);
  if (f1 == f2) return LikertValue::make(0);
  if (f1 <= f2 + sigma) return LikertValue::make(1);
  return LikertValue::make(2);
}

OutcomeSet emit_outcome_set(LikertValue p_true, const OracleConfig& cfg, std::mt19937_64& rng) {
  const int p = p_true.value();
  if (unit_uniform(rng()) < cfg.multi_prob) {
    int neighbor = 0;
    switch (p) {
      case -2: neighbor = -1; break;
      case 2: neighbor = 1; break;
      default: neighbor = (rng() & 1U) ? p + 1 : p - 1; break;
    }
    const int c_true = draw_certainty(cfg.certainty_weights, 3, rng);
    const int c_neighbor = draw_certainty(cfg.certainty_weights, 3, rng);
    return validate_outcome_set({{p, c_true}, {neighbor, c_neighbor}});
  }
  return validate_outcome_set({{p, draw_certainty(cfg.certainty_weights, 4, rng)}});
}

double default_oracle_sigma(const BenchmarkFunction& fn, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  Vector x(fn.n);
  for (int s = 0; s < 1000; ++s) {
    for (int k = 0; k < fn.n; ++k) x[k] = fn.lower[k] + unit_uniform(rng()) * (fn.upper[k] - fn.lower[k]);
    const double v = fn.evaluate(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return 0.1 * (hi - lo);
}

QueryOracle make_query_oracle(const BenchmarkFunction& fn, const OracleConfig& cfg) {
  if (!(cfg.sigma > 0.0)) throw Error(ErrorCode::BadConfig, "oracle sigma must be positive");
  if (!(cfg.multi_prob >= 0.0 && cfg.multi_prob <= 1.0)) throw Error(ErrorCode::BadConfig, "multi_prob must lie in [0, 1]");
  auto rng = std::make_shared<std::mt19937_64>(cfg.seed);
  return [fn, cfg, rng](const Vector& a, const Vector& b) {
    const auto p = true_likert(eval_benchmark(fn, a), eval_benchmark(fn, b), cfg.sigma);
    return emit_outcome_set(p, cfg, *rng);
  };
}

}  // namespace likertopt
