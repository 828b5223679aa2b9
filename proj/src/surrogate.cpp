#include "likertopt/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "likertopt/error.hpp"

namespace likertopt {

double sq_distance(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");
  return (x - y).squaredNorm();
}

double SurrogateModel::operator()(const Vector& x) const {
  double value = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    value += beta[static_cast<Eigen::Index>(i)] * rbf_inverse_quadratic(gamma, (x - centers[i]).squaredNorm());
  }
  return value;
}

double surrogate_eval(const SurrogateModel& model, const Vector& x) {
  if (!model.centers.empty() && x.size() != model.centers.front().size()) {
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from the surrogate centers");
  }
  return model(x);
}

Eigen::MatrixXd rbf_matrix(std::span<const Vector> samples, double gamma) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phi(i, i) = 1.0;
    for (Eigen::Index k = 0; k < i; ++k) {
      const double v = rbf_inverse_quadratic(
          gamma, sq_distance(samples[static_cast<std::size_t>(i)], samples[static_cast<std::size_t>(k)]));
      phi(i, k) = v;
      phi(k, i) = v;
    }
  }
  return phi;
}

Band preference_band(const OutcomeSet& os, double sigma1, double sigma2) {
  const auto lo = bounds_for_level(LikertValue::make(os.p_min()), sigma1, sigma2);
  const auto hi = bounds_for_level(LikertValue::make(os.p_max()), sigma1, sigma2);
  return {lo.lower, hi.upper};
}

namespace {

BoundSpec three_level_bounds(const OutcomeSet& os, double sigma1) {
  BoundSpec bs;
  if (os.p_min() >= 0) {
    bs.lower = os.p_min() == 0 ? -sigma1 : sigma1;
    bs.slack_sign_lower = -1;
  }
  if (os.p_max() <= 0) {
    bs.upper = os.p_max() == 0 ? sigma1 : -sigma1;
    bs.slack_sign_upper = 1;
  }
  return bs;
}

}  // namespace

Band record_band(const OutcomeSet& os, const FitParams& params) {
  if (!params.three_level) return preference_band(os, params.sigma1, params.sigma2);
  const auto bs = three_level_bounds(os, params.sigma1);
  return {bs.lower, bs.upper};
}

void check_records(std::span<const PreferenceRecord> records, std::size_t num_samples) {
  for (const auto& r : records) {
    if (r.i < 0 || r.j < 0 || static_cast<std::size_t>(r.i) >= num_samples ||
        static_cast<std::size_t>(r.j) >= num_samples) {
      throw Error(ErrorCode::IndexOutOfRange, "record references a missing sample");
    }
    if (r.i == r.j) throw Error(ErrorCode::IndexOutOfRange, "record compares a sample with itself");
  }
}

namespace {

struct RowBuilder {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> rhs;

  // sign * a·β − ε ≤ bound
  void band_row(const Eigen::RowVectorXd& a, double sign, Eigen::Index slack, double bound) {
    const auto r = static_cast<Eigen::Index>(rhs.size());
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      if (a[k] != 0.0) triplets.emplace_back(r, k, sign * a[k]);
    }
    triplets.emplace_back(r, slack, -1.0);
    rhs.push_back(bound);
  }

  void nonnegative(Eigen::Index slack) {
    triplets.emplace_back(static_cast<Eigen::Index>(rhs.size()), slack, -1.0);
    rhs.push_back(0.0);
  }

  void band(const Eigen::RowVectorXd& a, const BoundSpec& bs, Eigen::Index slack) {
    if (bs.has_lower()) band_row(a, -1.0, slack, -bs.lower);
    if (bs.has_upper()) band_row(a, 1.0, slack, bs.upper);
    nonnegative(slack);
  }
};

}  // namespace

AssembledProgram assemble_qp(std::span<const Vector> samples, std::span<const PreferenceRecord> records,
                             const FitParams& params) {
  check_tolerances(params.sigma1, params.sigma2);
  if (!(params.lambda > 0.0)) throw Error(ErrorCode::BadConfig, "lambda must be positive");
  if (!(params.gamma > 0.0)) throw Error(ErrorCode::BadConfig, "gamma must be positive");
  check_records(records, samples.size());

  AssembledProgram out;
  out.num_centers = static_cast<int>(samples.size());
  out.phi = rbf_matrix(samples, params.gamma);

  Eigen::Index n_vars = out.num_centers;
  out.slacks.reserve(records.size());
  for (const auto& rec : records) {
    SlackLayout layout;
    layout.shared = n_vars++;
    if (!params.three_level && rec.outcome_set.q() >= 2) {
      for (int t = 0; t < rec.outcome_set.q(); ++t) layout.per_outcome.push_back(n_vars++);
    }
    out.slacks.push_back(std::move(layout));
  }

  auto& qp = out.qp;
  qp.q_diag = Vector::Zero(n_vars);
  qp.q_diag.head(out.num_centers).setConstant(params.lambda);
  qp.c = Vector::Zero(n_vars);

  RowBuilder rows;
  for (std::size_t h = 0; h < records.size(); ++h) {
    const auto& rec = records[h];
    const auto& os = rec.outcome_set;
    const auto& layout = out.slacks[h];
    const Eigen::RowVectorXd a = out.phi.row(rec.i) - out.phi.row(rec.j);
    if (params.three_level) {
      qp.c[layout.shared] = 1.0;
      rows.band(a, three_level_bounds(os, params.sigma1), layout.shared);
      continue;
    }
    const auto weights = record_weights(os);

    qp.c[layout.shared] = weights.b;
    BoundSpec shared;
    const auto lo = bounds_for_level(LikertValue::make(os.p_min()), params.sigma1, params.sigma2);
    const auto hi = bounds_for_level(LikertValue::make(os.p_max()), params.sigma1, params.sigma2);
    shared.lower = lo.lower;
    shared.slack_sign_lower = lo.slack_sign_lower;
    shared.upper = hi.upper;
    shared.slack_sign_upper = hi.slack_sign_upper;
    rows.band(a, shared, layout.shared);

    for (std::size_t t = 0; t < layout.per_outcome.size(); ++t) {
      qp.c[layout.per_outcome[t]] = weights.w[t];
      rows.band(a, bounds_for_level(os.outcomes()[t].p, params.sigma1, params.sigma2), layout.per_outcome[t]);
    }
  }
  qp.A.resize(static_cast<Eigen::Index>(rows.rhs.size()), n_vars);
  qp.A.setFromTriplets(rows.triplets.begin(), rows.triplets.end());
  qp.b = Eigen::Map<const Vector>(rows.rhs.data(), static_cast<Eigen::Index>(rows.rhs.size()));
  return out;
}

FitResult fit_surrogate(std::span<const Vector> samples, std::span<const PreferenceRecord> records,
                        const FitParams& params, const QPOptions& qp_options) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleList, "surrogate needs at least one center");
  const auto program = assemble_qp(samples, records, params);
  auto solution = solve_qp(program.qp, qp_options);

  FitResult result;
  result.model.centers.assign(samples.begin(), samples.end());
  result.model.beta = solution.z.head(program.num_centers);
  result.model.gamma = params.gamma;

  auto& report = result.report;
  report.slack0 = Vector::Zero(static_cast<Eigen::Index>(records.size()));
  report.max_slack = 0.0;
  for (std::size_t h = 0; h < program.slacks.size(); ++h) {
    const auto& layout = program.slacks[h];
    report.slack0[static_cast<Eigen::Index>(h)] = solution.z[layout.shared];
    report.max_slack = std::max(report.max_slack, solution.z[layout.shared]);
    Vector per(static_cast<Eigen::Index>(layout.per_outcome.size()));
    for (std::size_t t = 0; t < layout.per_outcome.size(); ++t) {
      per[static_cast<Eigen::Index>(t)] = solution.z[layout.per_outcome[t]];
    }
    report.slacks.push_back(std::move(per));
  }
  report.objective_value = solution.objective;
  report.solution = std::move(solution);
  return result;
}

double record_difference(const SurrogateModel& model, const PreferenceRecord& record) {
  return model(model.centers[static_cast<std::size_t>(record.i)]) -
         model(model.centers[static_cast<std::size_t>(record.j)]);
}

CrossValidation cross_validate_gamma(std::span<const Vector> samples,
                                     std::span<const PreferenceRecord> records,
                                     std::span<const double> grid, int folds, const FitParams& params,
                                     std::uint64_t seed, double fallback_gamma,
                                     const QPOptions& qp_options) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "gamma grid is empty");
  CrossValidation cv;
  if (grid.size() == 1) {
    cv.gamma = grid.front();
    cv.skipped = true;
    return cv;
  }
  if (folds < 2 || records.size() < static_cast<std::size_t>(folds)) {
    cv.gamma = fallback_gamma;
    cv.skipped = true;
    return cv;
  }

  // Seeded Fisher-Yates on record indices; record k goes to fold perm_pos % K.
  const std::size_t m = records.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = m - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  cv.fold_of_record.assign(m, 0);
  for (std::size_t pos = 0; pos < m; ++pos) cv.fold_of_record[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));

  std::vector<PreferenceRecord> train;
  for (double gamma : grid) {
    FitParams p = params;
    p.gamma = gamma;
    double total = 0.0;
    for (int f = 0; f < folds; ++f) {
      train.clear();
      for (std::size_t h = 0; h < m; ++h) {
        if (cv.fold_of_record[h] != f) train.push_back(records[h]);
      }
      const auto fit = fit_surrogate(samples, train, p, qp_options);
      int held = 0;
      int consistent = 0;
      for (std::size_t h = 0; h < m; ++h) {
        if (cv.fold_of_record[h] != f) continue;
        ++held;
        const auto band = record_band(records[h].outcome_set, params);
        if (band.contains(record_difference(fit.model, records[h]))) ++consistent;
      }
      total += static_cast<double>(consistent) / static_cast<double>(held);
    }
    cv.scores.push_back(total / folds);
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (cv.scores[g] > cv.scores[best] || (cv.scores[g] == cv.scores[best] && grid[g] < grid[best])) best = g;
  }
  cv.gamma = grid[best];
  return cv;
}

}  // namespace likertopt
