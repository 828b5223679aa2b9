#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "likertopt/error.hpp"
#include "likertopt/global_min.hpp"

using namespace likertopt;

namespace {

ValidatedProblem box(int n, double lo, double hi) {
  ProblemSpec s;
  s.n = n;
  s.lower = Vector::Constant(n, lo);
  s.upper = Vector::Constant(n, hi);
  return validate_problem(s);
}

}  // namespace

TEST_CASE("latin_hypercube stratification") {
  const auto p = box(1, 0.0, 1.0);
  const auto pts = latin_hypercube(p, 2, 5);
  REQUIRE(pts.size() == 2);
  const double lo = std::min(pts[0][0], pts[1][0]);
  const double hi = std::max(pts[0][0], pts[1][0]);
  CHECK(lo >= 0.0);
  CHECK(lo < 0.5);
  CHECK(hi >= 0.5);
  CHECK(hi <= 1.0);

  const auto q = box(3, -2.0, 4.0);
  const int count = 17;
  const auto cloud = latin_hypercube(q, count, 99);
  for (int k = 0; k < 3; ++k) {
    std::vector<int> hits(count, 0);
    for (const auto& x : cloud) {
      const int cell = std::min(count - 1, static_cast<int>((x[k] + 2.0) / 6.0 * count));
      ++hits[static_cast<std::size_t>(cell)];
    }
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
}

TEST_CASE("latin_hypercube is deterministic and respects linear constraints") {
  ProblemSpec s;
  s.n = 2;
  s.lower = Vector::Zero(2);
  s.upper = Vector::Ones(2);
  s.linear_constraints.push_back({Vector::Ones(2), 1.2});
  const auto p = validate_problem(s);
  const auto a = latin_hypercube(p, 8, 42);
  const auto b = latin_hypercube(p, 8, 42);
  REQUIRE(a.size() == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(is_feasible(p, a[i]));
  }
}

TEST_CASE("latin_hypercube reports an infeasible region") {
  ProblemSpec s;
  s.n = 2;
  s.lower = Vector::Zero(2);
  s.upper = Vector::Ones(2);
  s.linear_constraints.push_back({Vector::Ones(2), -1.0});
  CHECK_THROWS_AS(latin_hypercube(validate_problem(s), 4, 1), Error);
}

TEST_CASE("minimize_acquisition finds an interior quadratic minimum") {
  const auto p = box(1, -1.0, 1.0);
  const auto res = minimize_acquisition([](const Vector& x) { return (x[0] - 0.3) * (x[0] - 0.3); }, p,
                                        SearchBudget::defaults(1, 3));
  CHECK(std::abs(res.point[0] - 0.3) < 1e-2);
}

TEST_CASE("minimize_acquisition reaches a boundary optimum") {
  const auto p = box(1, -1.0, 1.0);
  const auto res = minimize_acquisition([](const Vector& x) { return x[0]; }, p, SearchBudget::defaults(1, 3));
  CHECK(std::abs(res.point[0] + 1.0) < 1e-6);
}

TEST_CASE("minimize_acquisition is deterministic, feasible and within budget") {
  ProblemSpec s;
  s.n = 3;
  s.lower = Vector::Constant(3, -1.0);
  s.upper = Vector::Constant(3, 1.0);
  s.linear_constraints.push_back({Vector::Ones(3), 0.5});
  const auto p = validate_problem(s);
  auto f = [](const Vector& x) { return -x.sum() + 0.1 * std::sin(7.0 * x[0]); };
  long calls = 0;
  auto counted = [&](const Vector& x) {
    ++calls;
    return f(x);
  };
  const SearchBudget budget{300, 40, 9};
  const auto a = minimize_acquisition(counted, p, budget);
  const auto b = minimize_acquisition(f, p, budget);
  CHECK(a.point == b.point);
  CHECK(is_feasible(p, a.point));
  CHECK(calls == a.evaluations);
  CHECK(calls <= budget.scan_points + budget.refine_iters * (2 * 3 + 1));
  for (const auto& x : latin_hypercube(p, budget.scan_points, budget.seed)) CHECK(a.value <= f(x));
}

TEST_CASE("project_feasible backtracks toward the anchor") {
  ProblemSpec s;
  s.n = 2;
  s.lower = Vector::Constant(2, -1.0);
  s.upper = Vector::Constant(2, 1.0);
  s.linear_constraints.push_back({Vector::Ones(2), 0.0});
  const auto p = validate_problem(s);
  Vector from = Vector::Constant(2, -0.5);
  Vector target = Vector::Constant(2, 2.0);
  REQUIRE(project_feasible(p, from, target));
  CHECK(is_feasible(p, target));
}
