#pragma once

#include <Eigen/Dense>
#include <vector>

#include <json.hpp>

namespace likertopt {

using Vector = Eigen::VectorXd;

/// One affine inequality a·x − b ≤ 0.
struct LinearConstraint {
  Vector a;
  double b = 0.0;
};

/// Box-bounded problem with optional linear inequality constraints.
struct ProblemSpec {
  int n = 0;
  Vector lower;
  Vector upper;
  std::vector<LinearConstraint> linear_constraints;
};

/// A point in the internal [-1, 1]^n frame.
struct ScaledPoint {
  Vector coords;
};

inline constexpr double kDefaultFeasibilityTol = 1e-9;

/// A ProblemSpec that passed validation. Only validate_problem() creates one,
/// so every numeric module can assume well-formed bounds.
class ValidatedProblem {
 public:
  [[nodiscard]] const ProblemSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] int dim() const noexcept { return spec_.n; }
  [[nodiscard]] const Vector& lower() const noexcept { return spec_.lower; }
  [[nodiscard]] const Vector& upper() const noexcept { return spec_.upper; }
  [[nodiscard]] bool has_linear_constraints() const noexcept {
    return !spec_.linear_constraints.empty();
  }

  /// The same feasible set expressed in the scaled frame: box [-1,1]^n and
  /// the linear constraints rewritten for the affine change of variables.
  [[nodiscard]] ValidatedProblem scaled() const;

  friend ValidatedProblem validate_problem(const ProblemSpec& spec);

 private:
  explicit ValidatedProblem(ProblemSpec spec) : spec_(std::move(spec)) {}
  ProblemSpec spec_;
};

ValidatedProblem validate_problem(const ProblemSpec& spec);

ScaledPoint scale_point(const ValidatedProblem& problem, const Vector& x);
Vector unscale_point(const ValidatedProblem& problem, const ScaledPoint& s);

bool is_feasible(const ValidatedProblem& problem, const Vector& x,
                 double tol = kDefaultFeasibilityTol);

/// Largest linear-constraint violation max_i (a_i·x − b_i), or -inf without constraints.
double max_linear_violation(const ValidatedProblem& problem, const Vector& x);

// JSON: {"n":int,"lower":[...],"upper":[...],"linear":[{"a":[...],"b":real}]}
ProblemSpec problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const ProblemSpec& spec);

}  // namespace likertopt
