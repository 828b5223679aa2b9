#pragma once

#include <span>
#include <vector>

#include "likertopt/surrogate.hpp"

namespace likertopt {

inline constexpr double kCoincidenceTol = 1e-12;

/// IDW exploration term: 0 on the sample set, otherwise
/// arctan(1 / Σ_i 1/‖x − x_i‖²), always below π/2.
double idw_z(const Vector& x, std::span<const Vector> samples);

/// max_i f̂(x_i) − min_i f̂(x_i), or 1 when the surrogate is flat (< 1e-9).
double surrogate_range(const SurrogateModel& model, std::span<const Vector> samples);

struct AcquisitionContext {
  SurrogateModel model;
  std::vector<Vector> samples;
  double delta_F = 1.0;
  double alpha = 0.0;
  double alpha_bar = 1.0;
};

/// a(x) = f̂(x)/ΔF̂ − α z(x)
double acquisition_eval(const AcquisitionContext& ctx, const Vector& x);

/// Exploration weight schedule: 0.2ᾱ right after a new best, otherwise
/// grow by 0.1ᾱ up to ᾱ.
double update_alpha(double alpha, double alpha_bar, bool proposal_became_best);

}  // namespace likertopt
