#include "likertopt/problem.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "likertopt/error.hpp"

namespace likertopt {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

ValidatedProblem validate_problem(const ProblemSpec& spec) {
  if (spec.n < 1) {
    throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 1");
  }
  if (spec.lower.size() != spec.n || spec.upper.size() != spec.n) {
    throw Error(ErrorCode::DimensionMismatch, "bound vectors must have length n");
  }
  if (!all_finite(spec.lower) || !all_finite(spec.upper)) {
    throw Error(ErrorCode::NonFinite, "bounds must be finite");
  }
  for (int k = 0; k < spec.n; ++k) {
    if (!(spec.lower[k] < spec.upper[k])) {
      throw Error(ErrorCode::EmptyBox, "lower[" + std::to_string(k) + "] >= upper[" +
                                           std::to_string(k) + "]");
    }
  }
  for (const auto& row : spec.linear_constraints) {
    if (row.a.size() != spec.n) {
      throw Error(ErrorCode::DimensionMismatch, "constraint row length differs from n");
    }
    if (!all_finite(row.a) || !std::isfinite(row.b)) {
      throw Error(ErrorCode::NonFinite, "constraint coefficients must be finite");
    }
  }
  return ValidatedProblem(spec);
}

ValidatedProblem ValidatedProblem::scaled() const {
  // x = mid + half .* s
  const Vector mid = 0.5 * (spec_.upper + spec_.lower);
  const Vector half = 0.5 * (spec_.upper - spec_.lower);
  ProblemSpec out;
  out.n = spec_.n;
  out.lower = Vector::Constant(spec_.n, -1.0);
  out.upper = Vector::Constant(spec_.n, 1.0);
  for (const auto& row : spec_.linear_constraints) {
    out.linear_constraints.push_back({row.a.cwiseProduct(half), row.b - row.a.dot(mid)});
  }
  return ValidatedProblem(std::move(out));
}

ScaledPoint scale_point(const ValidatedProblem& problem, const Vector& x) {
  if (x.size() != problem.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from problem");
  }
  const Vector& l = problem.lower();
  const Vector& u = problem.upper();
  for (int k = 0; k < problem.dim(); ++k) {
    if (!(x[k] >= l[k] - 1e-9 && x[k] <= u[k] + 1e-9)) {
      throw Error(ErrorCode::OutOfBounds, "coordinate " + std::to_string(k) + " outside box");
    }
  }
  Vector s = (2.0 * x - (u + l)).cwiseQuotient(u - l);
  return {s.cwiseMax(-1.0).cwiseMin(1.0)};
}

Vector unscale_point(const ValidatedProblem& problem, const ScaledPoint& s) {
  if (s.coords.size() != problem.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from problem");
  }
  const Vector& l = problem.lower();
  const Vector& u = problem.upper();
  return 0.5 * (u + l) + 0.5 * (u - l).cwiseProduct(s.coords);
}

double max_linear_violation(const ValidatedProblem& problem, const Vector& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& row : problem.spec().linear_constraints) {
    worst = std::max(worst, row.a.dot(x) - row.b);
  }
  return worst;
}

bool is_feasible(const ValidatedProblem& problem, const Vector& x, double tol) {
  if (x.size() != problem.dim() || !x.allFinite()) return false;
  for (int k = 0; k < problem.dim(); ++k) {
    if (x[k] < problem.lower()[k] - tol || x[k] > problem.upper()[k] + tol) return false;
  }
  return !(max_linear_violation(problem, x) > tol);
}

namespace {

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, "expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::SchemaError, "expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

nlohmann::json vector_to_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

ProblemSpec problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "problem must be an object");
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw Error(ErrorCode::SchemaError, "problem.n must be an integer");
  }
  if (!j.contains("lower") || !j.contains("upper")) {
    throw Error(ErrorCode::SchemaError, "problem.lower and problem.upper are required");
  }
  ProblemSpec spec;
  spec.n = j["n"].get<int>();
  spec.lower = vector_from_json(j["lower"]);
  spec.upper = vector_from_json(j["upper"]);
  if (j.contains("linear")) {
    if (!j["linear"].is_array()) throw Error(ErrorCode::SchemaError, "problem.linear must be an array");
    for (const auto& row : j["linear"]) {
      if (!row.is_object() || !row.contains("a") || !row.contains("b") || !row["b"].is_number()) {
        throw Error(ErrorCode::SchemaError, "linear rows need \"a\" and \"b\"");
      }
      spec.linear_constraints.push_back({vector_from_json(row["a"]), row["b"].get<double>()});
    }
  }
  return spec;
}

nlohmann::json problem_to_json(const ProblemSpec& spec) {
  nlohmann::json j;
  j["n"] = spec.n;
  j["lower"] = vector_to_json(spec.lower);
  j["upper"] = vector_to_json(spec.upper);
  j["linear"] = nlohmann::json::array();
  for (const auto& row : spec.linear_constraints) {
    j["linear"].push_back({{"a", vector_to_json(row.a)}, {"b", row.b}});
  }
  return j;
}

}  // namespace likertopt
