#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "likertopt/problem.hpp"

namespace likertopt {

struct SearchBudget {
  int scan_points = 2000;
  int refine_iters = 200;
  std::uint64_t seed = 0;

  /// 2000·n scan candidates and 200 pattern-search sweeps.
  static SearchBudget defaults(int n, std::uint64_t seed = 0) { return {2000 * n, 200, seed}; }
};

/// Stratified sample of `count` points in the problem box: every coordinate
/// hits each of `count` equal strata exactly once. Points violating linear
/// constraints are redrawn inside their strata; 1000 consecutive failures
/// raise InfeasibleRegion.
std::vector<Vector> latin_hypercube(const ValidatedProblem& problem, int count, std::uint64_t seed);

struct SearchResult {
  Vector point;
  double value = 0.0;
  long evaluations = 0;
};

using Objective = std::function<double(const Vector&)>;

/// Scan over a fresh Latin-hypercube cloud, then a projected coordinate
/// pattern search from the best candidate (step starts at a quarter of the
/// box width and halves when a sweep fails).
SearchResult minimize_acquisition(const Objective& objective, const ValidatedProblem& problem,
                                  const SearchBudget& budget);

/// Moves `target` back toward the feasible `from` until linear constraints
/// hold (after clipping to the box). Returns false if no feasible point is found.
bool project_feasible(const ValidatedProblem& problem, const Vector& from, Vector& target);

/// Uniform double in [0, 1) from 53 random bits; portable across standard libraries.
double unit_uniform(std::uint64_t bits);

}  // namespace likertopt
