#include "likertopt/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "likertopt/error.hpp"

namespace likertopt {

namespace {

bool coincides(const Vector& x, const Vector& y) {
  return (x - y).cwiseAbs().maxCoeff() <= kCoincidenceTol;
}

}  // namespace

double idw_z(const Vector& x, std::span<const Vector> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleList, "exploration term needs samples");
  double inv_sum = 0.0;
  for (const auto& s : samples) {
    if (coincides(x, s)) return 0.0;
    inv_sum += 1.0 / sq_distance(x, s);
  }
  return std::atan(1.0 / inv_sum);
}

double surrogate_range(const SurrogateModel& model, std::span<const Vector> samples) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const double v = model(s);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = hi - lo;
  return (range < 1e-9 || !std::isfinite(range)) ? 1.0 : range;
}

double acquisition_eval(const AcquisitionContext& ctx, const Vector& x) {
  const auto& model = ctx.model;
  double f = 0.0;
  for (std::size_t i = 0; i < model.centers.size(); ++i) {
    f += model.beta[static_cast<Eigen::Index>(i)] *
         rbf_inverse_quadratic(model.gamma, (x - model.centers[i]).squaredNorm());
  }
  const double exploitation = f / ctx.delta_F;
  if (ctx.alpha == 0.0) return exploitation;
  return exploitation - ctx.alpha * idw_z(x, ctx.samples);
}

double update_alpha(double alpha, double alpha_bar, bool proposal_became_best) {
  if (proposal_became_best) return 0.2 * alpha_bar;
  return std::min(alpha + 0.1 * alpha_bar, alpha_bar);
}

}  // namespace likertopt
