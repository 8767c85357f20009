#include "kldsel/bandwidth.hpp"

#include "kldsel/error.hpp"
#include "kldsel/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace kldsel {

const char*
to_string(Objective objective) noexcept
{
  switch (objective) {
    case Objective::cv:
      return "cv";
    case Objective::mcv:
      return "mcv";
    case Objective::fixed:
      return "fixed";
  }
  return "unknown";
}

double
l2_norm_squared(const Sample& sample, double h, EstimatorKind kind)
{
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ParameterError("bandwidth must be positive and finite");
  }
  const double lo = sample.min() - 8.0 * h;
  const double hi = sample.max() + 8.0 * h;
  const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / h));
  auto squared = [&](double x) {
    const double f = estimate_at(sample, h, x, kind);
    return f * f;
  };
  return quadrature::adaptive_trapezoid(squared, lo, hi, panels, 1e-6).value;
}

namespace {

double
cross_validation(const Sample& sample, double h, EstimatorKind kind)
{
  if (sample.size() < 2) {
    throw ParameterError("cross-validation needs at least two observations");
  }
  const double n = static_cast<double>(sample.size());
  return l2_norm_squared(sample, h, kind) - 2.0 / n * loo_sum(sample, h, kind);
}

} // namespace

double
cv_objective(const Sample& sample, double h)
{
  return cross_validation(sample, h, EstimatorKind::classical);
}

double
mcv_objective(const Sample& sample, double h)
{
  return cross_validation(sample, h, EstimatorKind::bias_reduced);
}

double
reference_bandwidth(const Sample& sample)
{
  if (sample.size() < 2) {
    throw ParameterError("reference bandwidth needs at least two observations");
  }
  if (!(sample.sd() > 0.0)) {
    throw ParameterError("reference bandwidth needs a sample with positive variance");
  }
  return 1.06 * sample.sd() * std::pow(static_cast<double>(sample.size()), -0.2);
}

SearchRange
default_search_range(const Sample& sample)
{
  const double ref = reference_bandwidth(sample);
  return {0.1 * ref, 3.0 * ref};
}

BandwidthSelection
minimize_bandwidth(const std::function<double(double)>& objective,
                   double lo,
                   double hi,
                   GridRule rule)
{
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw ParameterError("bandwidth search needs 0 < lo < hi");
  }

  constexpr std::size_t m = coarse_grid_points;
  std::array<double, m> hs{};
  std::array<double, m> vs{};
  const double log_lo = std::log(lo);
  const double log_step = (std::log(hi) - log_lo) / static_cast<double>(m - 1);
  std::size_t evaluations = 0;
  auto eval = [&](double h) {
    ++evaluations;
    try {
      return objective(h);
    } catch (const NumericError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  for (std::size_t i = 0; i < m; ++i) {
    hs[i] = i == 0 ? lo : i + 1 == m ? hi : std::exp(log_lo + static_cast<double>(i) * log_step);
    vs[i] = eval(hs[i]);
  }

  // Ties go to the smaller h because the scan runs upward with strict <.
  std::size_t best = m;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::isfinite(vs[i]) && (best == m || vs[i] < vs[best])) {
      best = i;
    }
  }
  if (best == m) {
    throw NumericError("bandwidth objective is non-finite on the entire search grid");
  }
  if (rule == GridRule::interior_minimum) {
    std::size_t interior = m;
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const bool local = std::isfinite(vs[i]) && std::isfinite(vs[i - 1]) &&
                         std::isfinite(vs[i + 1]) && vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1];
      if (local && (interior == m || vs[i] < vs[interior])) {
        interior = i;
      }
    }
    if (interior != m) {
      best = interior;
    }
  }

  // Golden-section search on the neighbouring grid cells.
  double a = hs[best == 0 ? 0 : best - 1];
  double b = hs[best + 1 == m ? m - 1 : best + 1];
  constexpr double inv_phi = 0.618033988749894848204586834366;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (b - a >= 1e-4 * 0.5 * (a + b)) {
    // NaN compares false, so a non-finite f1 moves the bracket away from x1.
    if (f1 <= f2 || std::isnan(f2)) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    }
  }

  double h_star = hs[best];
  double value = vs[best];
  for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (std::isfinite(f) && (f < value || (f == value && x < h_star))) {
      h_star = x;
      value = f;
    }
  }
  return {h_star, value, Objective::fixed, lo, hi, evaluations};
}

BandwidthSelection
select_bandwidth(const Sample& sample, Objective objective, double lo, double hi)
{
  if (sample.size() < 2) {
    throw ParameterError("bandwidth selection needs at least two observations");
  }
  std::function<double(double)> fn;
  switch (objective) {
    case Objective::cv:
      fn = [&sample](double h) { return cv_objective(sample, h); };
      break;
    case Objective::mcv:
      fn = [&sample](double h) { return mcv_objective(sample, h); };
      break;
    case Objective::fixed:
      throw ParameterError("select_bandwidth: use fixed_bandwidth for a fixed h");
  }
  const GridRule rule = sample.has_ties() ? GridRule::interior_minimum : GridRule::global_minimum;
  BandwidthSelection sel = minimize_bandwidth(fn, lo, hi, rule);
  sel.objective = objective;
  return sel;
}

BandwidthSelection
select_bandwidth(const Sample& sample, Objective objective)
{
  const SearchRange range = default_search_range(sample);
  return select_bandwidth(sample, objective, range.lo, range.hi);
}

BandwidthSelection
fixed_bandwidth(double h)
{
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ParameterError("fixed bandwidth must be positive and finite");
  }
  return {h, std::numeric_limits<double>::quiet_NaN(), Objective::fixed, h, h, 0};
}

} // namespace kldsel
