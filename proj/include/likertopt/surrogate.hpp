#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "likertopt/preference.hpp"
#include "likertopt/problem.hpp"
#include "likertopt/qp.hpp"

namespace likertopt {

/// Squared Euclidean norm ‖x − y‖².
double sq_distance(const Vector& x, const Vector& y);

/// φ(γr) = 1 / (1 + (γr)²)
inline double rbf_inverse_quadratic(double gamma, double r) {
  const double t = gamma * r;
  return 1.0 / (1.0 + t * t);
}

enum class RbfKind { InverseQuadratic };

/// f̂(x) = Σ_i β_i φ(γ ‖x − x_i‖²) over centers in the scaled frame.
struct SurrogateModel {
  std::vector<Vector> centers;
  Vector beta;
  double gamma = 1.0;
  RbfKind kind = RbfKind::InverseQuadratic;

  [[nodiscard]] double operator()(const Vector& x) const;
};

double surrogate_eval(const SurrogateModel& model, const Vector& x);

/// N×N matrix Φ(i,k) = φ(γ ‖x_i − x_k‖²).
Eigen::MatrixXd rbf_matrix(std::span<const Vector> samples, double gamma);

struct FitParams {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double lambda = 1.0;
  double gamma = 1.0;
  /// Baseline formulation: each record keeps only the sign of its outcomes,
  /// with bands (−∞, −σ1], [−σ1, σ1], [σ1, ∞) and unit slack weight.
  bool three_level = false;
};

/// Index of every slack variable inside the assembled program.
struct SlackLayout {
  Eigen::Index shared = 0;                 // ε_{h,0}
  std::vector<Eigen::Index> per_outcome;  // ε_{h,t}; empty when q_h = 1
};

struct AssembledProgram {
  QuadraticProgram qp;
  int num_centers = 0;
  std::vector<SlackLayout> slacks;  // one per record
  Eigen::MatrixXd phi;              // Φ used for the rows
};

/// Finite [lower, upper] band the surrogate difference must satisfy for a
/// record at zero slack (lower = min Likert, upper = max Likert).
struct Band {
  double lower;
  double upper;
  [[nodiscard]] bool contains(double d) const noexcept { return d >= lower && d <= upper; }
};

Band preference_band(const OutcomeSet& os, double sigma1, double sigma2);

/// Band used for a record under the given parameters (honours three_level).
Band record_band(const OutcomeSet& os, const FitParams& params);

void check_records(std::span<const PreferenceRecord> records, std::size_t num_samples);

/// Builds the certainty-weighted slack-relaxed program over (β, ε).
AssembledProgram assemble_qp(std::span<const Vector> samples, std::span<const PreferenceRecord> records,
                             const FitParams& params);

struct FitReport {
  Vector slack0;
  std::vector<Vector> slacks;
  double objective_value = 0.0;
  double max_slack = 0.0;
  QPSolution solution;
};

struct FitResult {
  SurrogateModel model;
  FitReport report;
};

FitResult fit_surrogate(std::span<const Vector> samples, std::span<const PreferenceRecord> records,
                        const FitParams& params, const QPOptions& qp_options = {});

/// f̂(x_i) − f̂(x_j) for a record.
double record_difference(const SurrogateModel& model, const PreferenceRecord& record);

inline const std::vector<double> kDefaultGammaGrid{0.2, 0.5, 1.0, 2.0, 5.0};

struct CrossValidation {
  double gamma = 1.0;
  std::vector<double> scores;         // mean held-out consistency per grid entry
  std::vector<int> fold_of_record;   // empty when CV was skipped
  bool skipped = false;
};

/// K-fold selection of γ by held-out band consistency. Ties go to the
/// smaller γ. With fewer records than folds, returns fallback_gamma.
CrossValidation cross_validate_gamma(std::span<const Vector> samples,
                                     std::span<const PreferenceRecord> records,
                                     std::span<const double> grid, int folds, const FitParams& params,
                                     std::uint64_t seed, double fallback_gamma = 1.0,
                                     const QPOptions& qp_options = {});

}  // namespace likertopt
