#include <doctest.h>

#include <cmath>
#include <random>

#include "likertopt/error.hpp"
#include "likertopt/surrogate.hpp"
#include "reference_qp.hpp"

using namespace likertopt;

namespace {

Vector pt(std::initializer_list<double> v) {
  return Eigen::Map<const Vector>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

PreferenceRecord rec(int i, int j, std::vector<std::pair<int, int>> raw, std::uint64_t id = 0) {
  return {i, j, validate_outcome_set(raw), id};
}

/// Likert value of f1 against f2 with perception threshold sigma (test-side copy).
int likert_of(double f1, double f2, double sigma) {
  if (f1 < f2 - sigma) return -2;
  if (f1 < f2) return -1;
  if (f1 == f2) return 0;
  if (f1 <= f2 + sigma) return 1;
  return 2;
}

double max_row_violation(const QuadraticProgram& qp, const Vector& z) {
  const Vector r = qp.A * z - qp.b;
  return r.size() ? r.maxCoeff() : 0.0;
}

}  // namespace

TEST_CASE("sq_distance") {
  CHECK(sq_distance(pt({1, 2}), pt({1, 2})) == 0.0);
  CHECK(sq_distance(pt({0, 0}), pt({3, 4})) == 25.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    const Vector a = pt({nd(rng), nd(rng), nd(rng)});
    const Vector b = pt({nd(rng), nd(rng), nd(rng)});
    CHECK(sq_distance(a, b) == sq_distance(b, a));
    CHECK(sq_distance(a, b) > 0.0);
  }
  CHECK_THROWS_AS(sq_distance(pt({0}), pt({0, 1})), Error);
}

TEST_CASE("inverse quadratic RBF") {
  CHECK(rbf_inverse_quadratic(3.0, 0.0) == 1.0);
  CHECK(rbf_inverse_quadratic(1.0, 1.0) == 0.5);
  CHECK(rbf_inverse_quadratic(2.0, 1.0) == doctest::Approx(0.2));
}

TEST_CASE("surrogate_eval") {
  SurrogateModel m;
  m.centers = {pt({0.3, -0.2})};
  m.beta = pt({2.0});
  CHECK(surrogate_eval(m, pt({0.3, -0.2})) == 2.0);

  m.centers = {pt({-1, 0}), pt({1, 0})};
  m.beta = pt({0.0, 0.0});
  CHECK(surrogate_eval(m, pt({0.7, 0.1})) == 0.0);

  m.beta = pt({1.0, -1.0});
  CHECK(std::abs(surrogate_eval(m, pt({0.0, 0.9}))) < 1e-15);
  CHECK_THROWS_AS(surrogate_eval(m, pt({0.0})), Error);
}

TEST_CASE("surrogate is linear in beta") {
  SurrogateModel m;
  m.centers = {pt({-0.5}), pt({0.1}), pt({0.8})};
  m.beta = pt({0.3, -1.2, 0.7});
  SurrogateModel scaled = m;
  scaled.beta *= 3.5;
  for (double x : {-1.0, -0.2, 0.33, 0.9}) {
    CHECK(scaled(pt({x})) == doctest::Approx(3.5 * m(pt({x}))).epsilon(1e-14));
  }
}

TEST_CASE("assemble_qp variable and constraint counts") {
  const FitParams params{0.033, 0.5, 1.0, 1.0};
  {
    const std::vector<Vector> samples{pt({0.0}), pt({1.0})};
    const std::vector<PreferenceRecord> records{rec(0, 1, {{-2, 3}})};
    const auto prog = assemble_qp(samples, records, params);
    CHECK(prog.qp.num_variables() == 3);
    CHECK(prog.qp.num_constraints() == 2);
    CHECK(prog.qp.c[2] == 3.0);
  }
  {
    const std::vector<Vector> samples{pt({0.0}), pt({0.5}), pt({1.0})};
    const std::vector<PreferenceRecord> records{rec(0, 1, {{1, 2}}), rec(2, 1, {{-1, 1}, {0, 3}})};
    const auto prog = assemble_qp(samples, records, params);
    CHECK(prog.qp.num_variables() == 7);
    // record 0: two band rows + nonneg; record 1: shared (2 + 1), -1 band (2 + 1), 0 band (2 + 1)
    CHECK(prog.qp.num_constraints() == 3 + 9);
    CHECK(prog.qp.c[4] == 4.0);
    CHECK(prog.qp.c[5] == 0.25);
    CHECK(prog.qp.c[6] == 0.75);
  }
  {
    const std::vector<Vector> samples{pt({0.0}), pt({0.5})};
    const auto prog = assemble_qp(samples, {}, params);
    CHECK(prog.qp.num_variables() == 2);
    CHECK(prog.qp.num_constraints() == 0);
  }
}

TEST_CASE("assemble_qp rejects bad input") {
  const std::vector<Vector> samples{pt({0.0}), pt({1.0})};
  const std::vector<PreferenceRecord> bad{rec(0, 2, {{-1, 1}})};
  CHECK_THROWS_AS(assemble_qp(samples, bad, {0.1, 0.5, 1.0, 1.0}), Error);
  const std::vector<PreferenceRecord> ok{rec(0, 1, {{-1, 1}})};
  CHECK_THROWS_AS(assemble_qp(samples, ok, {0.5, 0.1, 1.0, 1.0}), Error);
}

TEST_CASE("fit without records is the zero surrogate") {
  const std::vector<Vector> samples{pt({0.0, 0.1}), pt({1.0, -0.3}), pt({-0.4, 0.9})};
  const auto fit = fit_surrogate(samples, {}, {0.033, 0.5, 1.0, 1.0});
  CHECK(fit.model.beta.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("fit honours a single strong preference") {
  const std::vector<Vector> samples{pt({-0.5}), pt({0.5})};
  const std::vector<PreferenceRecord> records{rec(0, 1, {{-2, 4}})};
  const FitParams params{0.033, 0.5, 1.0, 1.0};
  const auto fit = fit_surrogate(samples, records, params);
  const double eps = fit.report.slack0[0];
  CHECK(eps <= 1e-6);
  CHECK(record_difference(fit.model, records[0]) <= -params.sigma2 + eps + 1e-9);
}

TEST_CASE("fit matches the dual projected-gradient oracle on random assembled programs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> lik(-2, 2);
  std::uniform_int_distribution<int> cert(1, 3);
  for (int t = 0; t < 10; ++t) {
    const int n_samples = 3 + t;
    std::vector<Vector> samples;
    for (int i = 0; i < n_samples; ++i) samples.push_back(pt({u(rng), u(rng)}));
    std::vector<PreferenceRecord> records;
    for (int h = 0; h < 2 * n_samples; ++h) {
      const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(n_samples));
      const int j = (i + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_samples - 1))) % n_samples;
      const int p = lik(rng);
      std::vector<std::pair<int, int>> raw{{p, cert(rng)}};
      if (h % 3 == 0 && p < 2 && p != -1) raw.emplace_back(p + 1, cert(rng));
      records.push_back(rec(i, j, raw));
    }
    const FitParams params{0.05, 0.4, 1.0, 2.0};
    const auto fit = fit_surrogate(samples, records, params);
    const auto program = assemble_qp(samples, records, params);
    const auto ref = reference::projected_gradient_dual(program.qp);
    CHECK(std::abs(fit.report.objective_value - ref.primal) <= 1e-6);
    CHECK(max_row_violation(program.qp, fit.report.solution.z) <= 1e-6);
    for (Eigen::Index h = 0; h < fit.report.slack0.size(); ++h) CHECK(fit.report.slack0[h] >= -1e-9);
  }
}

TEST_CASE("three-level baseline formulation") {
  FitParams params{0.05, 0.4, 1.0, 1.0};
  params.three_level = true;
  const std::vector<Vector> samples{pt({0.0}), pt({0.5}), pt({1.0})};
  const std::vector<PreferenceRecord> records{rec(0, 1, {{-1, 2}, {-2, 1}}), rec(2, 1, {{0, 3}}),
                                              rec(1, 2, {{0, 1}, {1, 2}})};
  const auto prog = assemble_qp(samples, records, params);
  // one slack per record; rows: upper + nonneg, both + nonneg, lower + nonneg
  CHECK(prog.qp.num_variables() == 6);
  CHECK(prog.qp.num_constraints() == 2 + 3 + 2);
  CHECK(prog.qp.c.tail(3) == Vector::Ones(3));

  const auto neg = record_band(records[0].outcome_set, params);
  CHECK(std::isinf(neg.lower));
  CHECK(neg.upper == -0.05);
  const auto zero = record_band(records[1].outcome_set, params);
  CHECK(zero.lower == -0.05);
  CHECK(zero.upper == 0.05);
  const auto pos = record_band(records[2].outcome_set, params);
  CHECK(pos.lower == -0.05);
  CHECK(std::isinf(pos.upper));

  const auto fit = fit_surrogate(samples, records, params);
  const auto ref = reference::projected_gradient_dual(prog.qp);
  CHECK(std::abs(fit.report.objective_value - ref.primal) <= 1e-6);
  CHECK(fit.report.max_slack <= 1e-6);
  for (const auto& r : records) {
    const auto band = record_band(r.outcome_set, params);
    const double d = record_difference(fit.model, r);
    CHECK(d >= band.lower - 1e-6);
    CHECK(d <= band.upper + 1e-6);
  }
}

TEST_CASE("separable monotone data is fitted with zero slack") {
  // Latent f(x) = x on a 1-D grid; perception threshold chosen so every
  // nonzero Likert level appears.
  std::vector<Vector> samples;
  for (int i = 0; i < 8; ++i) samples.push_back(pt({-0.9 + 0.25 * i}));
  const double latent_sigma = 0.6;
  std::vector<PreferenceRecord> records;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; j += 2) {
      const int p = likert_of(samples[static_cast<std::size_t>(i)][0], samples[static_cast<std::size_t>(j)][0], latent_sigma);
      records.push_back(rec(i, j, {{p, 1 + (i + j) % 4}}));
      const int q = likert_of(samples[static_cast<std::size_t>(j)][0], samples[static_cast<std::size_t>(i)][0], latent_sigma);
      records.push_back(rec(j, i, {{q, 1 + (i * j) % 4}}));
    }
  }
  bool seen[5] = {false, false, false, false, false};
  for (const auto& r : records) seen[r.outcome_set.p_min() + 2] = true;
  CHECK(seen[0]);
  CHECK(seen[1]);
  CHECK(seen[3]);
  CHECK(seen[4]);

  const FitParams params{0.05, 0.5, 1.0, 0.5};
  const auto fit = fit_surrogate(samples, records, params);
  CHECK(fit.report.max_slack <= 1e-6);
  for (const auto& r : records) {
    const auto band = preference_band(r.outcome_set, params.sigma1, params.sigma2);
    const double d = record_difference(fit.model, r);
    CHECK(d >= band.lower - 1e-6);
    CHECK(d <= band.upper + 1e-6);
  }
}

TEST_CASE("cross_validate_gamma") {
  std::vector<Vector> samples;
  for (int i = 0; i < 12; ++i) samples.push_back(pt({-1.0 + 2.0 * i / 11.0}));
  auto latent = [](double x) { return x * x * x + 0.5 * x; };  // strictly increasing
  std::vector<PreferenceRecord> records;
  std::mt19937_64 rng(4);
  for (int h = 0; h < 30; ++h) {
    const int i = static_cast<int>(rng() % 12);
    const int j = (i + 1 + static_cast<int>(rng() % 11)) % 12;
    const int p = likert_of(latent(samples[static_cast<std::size_t>(i)][0]),
                            latent(samples[static_cast<std::size_t>(j)][0]), 0.4);
    records.push_back(rec(i, j, {{p, 2}}));
  }
  const FitParams params{0.05, 0.5, 1.0, 1.0};

  SUBCASE("singleton grid") {
    const std::vector<double> grid{1.0};
    CHECK(cross_validate_gamma(samples, records, grid, 5, params, 0).gamma == 1.0);
  }

  SUBCASE("chosen gamma is the best held-out grid member") {
    const std::vector<double> grid{0.5, 1.0, 2.0};
    const auto cv = cross_validate_gamma(samples, records, grid, 5, params, 17);
    REQUIRE(cv.fold_of_record.size() == records.size());
    // Exhaustive re-evaluation of every grid member on the same folds.
    std::vector<double> score(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      FitParams p = params;
      p.gamma = grid[g];
      for (int f = 0; f < 5; ++f) {
        std::vector<PreferenceRecord> train;
        std::vector<PreferenceRecord> held;
        for (std::size_t h = 0; h < records.size(); ++h) {
          (cv.fold_of_record[h] == f ? held : train).push_back(records[h]);
        }
        const auto fit = fit_surrogate(samples, train, p);
        int ok = 0;
        for (const auto& r : held) {
          const auto band = preference_band(r.outcome_set, params.sigma1, params.sigma2);
          const double d = record_difference(fit.model, r);
          if (d >= band.lower && d <= band.upper) ++ok;
        }
        score[g] += static_cast<double>(ok) / static_cast<double>(held.size()) / 5.0;
      }
    }
    const auto chosen = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), cv.gamma) - grid.begin());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      CHECK(score[chosen] >= score[g] - 1e-12);
      CHECK(cv.scores[g] == doctest::Approx(score[g]).epsilon(1e-12));
    }
  }

  SUBCASE("deterministic given the seed") {
    const std::vector<double> grid{0.5, 1.0, 2.0};
    const auto a = cross_validate_gamma(samples, records, grid, 5, params, 123);
    const auto b = cross_validate_gamma(samples, records, grid, 5, params, 123);
    CHECK(a.gamma == b.gamma);
    CHECK(a.fold_of_record == b.fold_of_record);
    CHECK(a.scores == b.scores);
  }

  SUBCASE("too few records keeps the fallback") {
    const std::vector<double> grid{0.5, 1.0, 2.0};
    const std::vector<PreferenceRecord> few(records.begin(), records.begin() + 3);
    const auto cv = cross_validate_gamma(samples, few, grid, 5, params, 1, 0.7);
    CHECK(cv.skipped);
    CHECK(cv.gamma == 0.7);
  }

  SUBCASE("empty grid") {
    CHECK_THROWS_AS(cross_validate_gamma(samples, records, std::span<const double>{}, 5, params, 1), Error);
  }
}
