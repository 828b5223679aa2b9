#include "likertopt/global_min.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "likertopt/error.hpp"

namespace likertopt {

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<Vector> latin_hypercube(const ValidatedProblem& problem, int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::BadConfig, "Latin hypercube needs at least one point");
  const int n = problem.dim();
  std::mt19937_64 rng(seed);
  const auto cnt = static_cast<std::size_t>(count);

  std::vector<std::vector<std::size_t>> strata(static_cast<std::size_t>(n), std::vector<std::size_t>(cnt));
  for (auto& perm : strata) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = cnt - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
  }

  const Vector& l = problem.lower();
  const Vector width = problem.upper() - l;
  auto draw = [&](std::size_t i) {
    Vector x(n);
    for (int k = 0; k < n; ++k) {
      const double cell = (static_cast<double>(strata[static_cast<std::size_t>(k)][i]) + unit_uniform(rng())) /
                          static_cast<double>(count);
      x[k] = std::min(l[k] + cell * width[k], problem.upper()[k]);
    }
    return x;
  };
  auto feasible = [&](const Vector& x) { return !problem.has_linear_constraints() || is_feasible(problem, x); };

  std::vector<Vector> points;
  points.reserve(cnt);
  for (std::size_t i = 0; i < cnt; ++i) points.push_back(draw(i));
  if (!problem.has_linear_constraints()) return points;

  // Redraw violators inside their strata. Every other failure also tries
  // exchanging one coordinate's stratum with another point, which keeps
  // the one-point-per-stratum property intact.
  for (std::size_t i = 0; i < cnt; ++i) {
    int failures = 0;
    while (!feasible(points[i])) {
      if (++failures >= 1000) {
        throw Error(ErrorCode::InfeasibleRegion, "could not draw a feasible point in its strata");
      }
      if (failures % 2 != 0 || cnt == 1) {
        points[i] = draw(i);
        continue;
      }
      const std::size_t j = (i + 1 + rng() % (cnt - 1)) % cnt;
      const auto k = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
      std::swap(strata[k][i], strata[k][j]);
      Vector xi = draw(i);
      Vector xj = draw(j);
      for (int retry = 0; retry < 4 && j < i && !feasible(xj); ++retry) xj = draw(j);
      if (feasible(xj) || j > i) {
        points[i] = std::move(xi);
        points[j] = std::move(xj);
      } else {
        std::swap(strata[k][i], strata[k][j]);
      }
    }
  }
  return points;
}

bool project_feasible(const ValidatedProblem& problem, const Vector& from, Vector& target) {
  target = target.cwiseMax(problem.lower()).cwiseMin(problem.upper());
  if (!problem.has_linear_constraints()) return true;
  const Vector dir = target - from;
  double t = 1.0;
  for (int halving = 0; halving < 60; ++halving) {
    const Vector cand = from + t * dir;
    if (max_linear_violation(problem, cand) <= kDefaultFeasibilityTol) {
      target = cand;
      return true;
    }
    t *= 0.5;
  }
  return false;
}

namespace {

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] != b[k]) return a[k] < b[k];
  }
  return false;
}

double safe_value(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

}  // namespace

SearchResult minimize_acquisition(const Objective& objective, const ValidatedProblem& problem,
                                  const SearchBudget& budget) {
  if (budget.scan_points < 1 || budget.refine_iters < 0) {
    throw Error(ErrorCode::BadConfig, "search budget must have scan_points >= 1 and refine_iters >= 0");
  }
  SearchResult best;
  best.value = std::numeric_limits<double>::infinity();

  // Phase 1: scan. Ties resolve to the lexicographically smallest point.
  for (const auto& cand : latin_hypercube(problem, budget.scan_points, budget.seed)) {
    const double v = safe_value(objective(cand));
    ++best.evaluations;
    if (best.point.size() == 0 || v < best.value || (v == best.value && lex_less(cand, best.point))) {
      best.point = cand;
      best.value = v;
    }
  }

  // Phase 2: coordinate pattern search.
  const int n = problem.dim();
  Vector step = 0.25 * (problem.upper() - problem.lower());
  const double min_step = 1e-12 * std::max(1.0, step.maxCoeff());
  Vector cand(n);
  for (int it = 0; it < budget.refine_iters && step.maxCoeff() > min_step; ++it) {
    bool improved = false;
    for (int k = 0; k < n; ++k) {
      for (double dir : {-1.0, 1.0}) {
        cand = best.point;
        cand[k] += dir * step[k];
        if (!project_feasible(problem, best.point, cand)) continue;
        if (cand == best.point) continue;
        const double v = safe_value(objective(cand));
        ++best.evaluations;
        if (v < best.value) {
          best.point = cand;
          best.value = v;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace likertopt
