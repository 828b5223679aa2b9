#include <doctest.h>

#include <cmath>
#include <random>

#include "likertopt/error.hpp"
#include "likertopt/oracle.hpp"

using namespace likertopt;

namespace {

Vector pt(std::initializer_list<double> v) {
  return Eigen::Map<const Vector>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

/// Grid scan followed by a shrinking compass search; independent of the
/// library's own optimizer.
double grid_minimum(double (*f)(const Vector&), const Vector& lo, const Vector& hi, int per_axis) {
  Vector best = lo;
  double best_v = f(lo);
  Vector x(2);
  for (int a = 0; a <= per_axis; ++a) {
    for (int b = 0; b <= per_axis; ++b) {
      x << lo[0] + (hi[0] - lo[0]) * a / per_axis, lo[1] + (hi[1] - lo[1]) * b / per_axis;
      const double v = f(x);
      if (v < best_v) {
        best_v = v;
        best = x;
      }
    }
  }
  double h = (hi[0] - lo[0]) / per_axis;
  while (h > 1e-12) {
    bool moved = false;
    for (int k = 0; k < 2; ++k) {
      for (double d : {-h, h}) {
        Vector c = best;
        c[k] = std::clamp(c[k] + d, lo[k], hi[k]);
        const double v = f(c);
        if (v < best_v) {
          best_v = v;
          best = c;
          moved = true;
        }
      }
    }
    if (!moved) h *= 0.5;
  }
  return best_v;
}

}  // namespace

TEST_CASE("benchmark values at known points") {
  CHECK(eval_benchmark(benchmark("camel6"), pt({0, 0})) == 0.0);
  CHECK(std::abs(eval_benchmark(benchmark("ackley2"), pt({0, 0}))) <= 1e-14);
  CHECK(eval_benchmark(benchmark("rosenbrock8"), Vector::Ones(8)) == 0.0);
  // hand-computed: camel6(1, 1) = (4 − 2.1 + 1/3) + 1 + 0
  CHECK(camel6(pt({1, 1})) == doctest::Approx(4.0 - 2.1 + 1.0 / 3.0 + 1.0));
  // rosenbrock on two coordinates (0, 0): 100·0 + 1
  CHECK(rosenbrock(pt({0, 0})) == 1.0);
  for (const auto& name : benchmark_names()) {
    const auto& fn = benchmark(name);
    CHECK(fn.lower.size() == fn.n);
    for (const auto& x : fn.optimizers) CHECK(eval_benchmark(fn, x) == doctest::Approx(fn.optimum_value).epsilon(1e-12));
  }
}

TEST_CASE("camel6 global minimum from an independent scan") {
  const auto& fn = benchmark("camel6");
  const double v = grid_minimum(camel6, fn.lower, fn.upper, 400);
  CHECK(v == doctest::Approx(-1.0316).epsilon(1e-4));
  CHECK(std::abs(v - fn.optimum_value) <= 1e-9);
}

TEST_CASE("benchmark registry and argument checks") {
  CHECK_THROWS_AS(benchmark("sphere"), Error);
  const auto& camel = benchmark("camel6");
  CHECK(camel.lower == pt({-2, -1}));
  CHECK(camel.upper == pt({2, 1}));
  CHECK(benchmark("ackley2").upper == pt({5, 5}));
  CHECK(benchmark("rosenbrock8").lower == Vector::Constant(8, -30.0));
  CHECK_THROWS_AS(eval_benchmark(camel, pt({0, 2})), Error);
  CHECK_THROWS_AS(eval_benchmark(camel, pt({0})), Error);
  CHECK_NOTHROW(eval_benchmark(camel, pt({2.0 + 1e-10, 1.0})));
  CHECK_NOTHROW(validate_problem(benchmark_problem(benchmark("rosenbrock8"))));
}

TEST_CASE("true_likert cases") {
  CHECK(true_likert(1.0, 2.0, 0.5).value() == -2);
  CHECK(true_likert(1.8, 2.0, 0.5).value() == -1);
  CHECK(true_likert(1.5, 2.0, 0.5).value() == -1);
  CHECK(true_likert(2.0, 2.0, 0.5).value() == 0);
  CHECK(true_likert(2.2, 2.0, 0.5).value() == 1);
  CHECK(true_likert(2.5, 2.0, 0.5).value() == 1);
  CHECK(true_likert(2.6, 2.0, 0.5).value() == 2);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 2000; ++t) {
    // Dyadic values keep f2 ± sigma exact, so the boundary cases stay symmetric.
    const double f1 = std::round(u(rng) * 8.0) / 8.0;
    const double f2 = std::round(u(rng) * 8.0) / 8.0;
    CHECK(true_likert(f1, f2, 0.5).value() == -true_likert(f2, f1, 0.5).value());
    CHECK(true_likert(f1, f2, 0.5).value() <= true_likert(f1 + 0.25, f2, 0.5).value());
  }
}

TEST_CASE("emit_outcome_set") {
  std::mt19937_64 rng(21);
  OracleConfig single;
  single.multi_prob = 0.0;
  bool seen_c[5] = {false, false, false, false, false};
  for (int t = 0; t < 400; ++t) {
    const auto os = emit_outcome_set(LikertValue::make(1), single, rng);
    REQUIRE(os.q() == 1);
    CHECK(os.outcomes()[0].p.value() == 1);
    seen_c[os.outcomes()[0].c.value()] = true;
  }
  CHECK((seen_c[1] && seen_c[2] && seen_c[3] && seen_c[4]));

  OracleConfig multi;
  multi.multi_prob = 1.0;
  for (int t = 0; t < 200; ++t) {
    const auto os = emit_outcome_set(LikertValue::make(-2), multi, rng);
    REQUIRE(os.q() == 2);
    CHECK(os.p_min() == -2);
    CHECK(os.p_max() == -1);
    for (const auto& o : os.outcomes()) CHECK(o.c.value() <= 3);
  }

  OracleConfig mixed;
  int pairs = 0;
  for (int t = 0; t < 10000; ++t) {
    const int p = static_cast<int>(rng() % 5) - 2;
    const auto os = emit_outcome_set(LikertValue::make(p), mixed, rng);
    CHECK_NOTHROW(validate_outcome_set(os.raw()));
    CHECK(os.contains(p));
    CHECK_FALSE((os.p_min() < 0 && os.p_max() > 0));
    CHECK(os.p_max() - os.p_min() <= 1);
    if (os.q() == 2) ++pairs;
  }
  CHECK(pairs > 4500);
  CHECK(pairs < 5500);

  OracleConfig sure_only;
  sure_only.certainty_weights = {0.0, 0.0, 0.0, 1.0};
  sure_only.multi_prob = 0.0;
  CHECK(emit_outcome_set(LikertValue::make(0), sure_only, rng).outcomes()[0].c.value() == 4);
}

TEST_CASE("query oracle") {
  const auto& fn = benchmark("camel6");
  OracleConfig cfg;
  cfg.sigma = default_oracle_sigma(fn);
  cfg.seed = 8;
  CHECK(cfg.sigma > 0.3);
  CHECK(cfg.sigma < 0.7);
  CHECK(default_oracle_sigma(fn) == cfg.sigma);

  auto oracle = make_query_oracle(fn, cfg);
  const Vector x = pt({0.3, -0.4});
  CHECK(oracle(x, x).contains(0));

  auto a = make_query_oracle(fn, cfg);
  auto b = make_query_oracle(fn, cfg);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Vector x1 = pt({2.0 * u(rng), u(rng)});
    const Vector x2 = pt({2.0 * u(rng), u(rng)});
    const auto oa = a(x1, x2);
    CHECK(oa == b(x1, x2));
    CHECK(oa.contains(true_likert(camel6(x1), camel6(x2), cfg.sigma).value()));
  }

  OracleConfig bad = cfg;
  bad.sigma = 0.0;
  CHECK_THROWS_AS(make_query_oracle(fn, bad), Error);
}
