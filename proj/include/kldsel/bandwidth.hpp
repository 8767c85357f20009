#pragma once

#include "kldsel/density.hpp"
#include "kldsel/sample.hpp"

#include <cstddef>
#include <functional>

namespace kldsel {

enum class Objective
{
  cv,    ///< least-squares cross-validation, classical estimator
  mcv,   ///< modified cross-validation, bias-reduced estimator
  fixed, ///< bandwidth supplied by the caller
};

const char* to_string(Objective objective) noexcept;

struct BandwidthSelection
{
  double h_star;
  double objective_value;
  Objective objective;
  double search_lo;
  double search_hi;
  std::size_t evaluations;
};

/// How the coarse grid picks the bracket that golden-section refines.
enum class GridRule
{
  /// Smallest grid value (ties to smaller h).
  global_minimum,
  /// Lowest interior local minimum of the grid; falls back to the global
  /// minimum when the grid has none. Used for tied data, where both criteria
  /// diverge to -inf as h -> 0 and the lower search edge always wins.
  interior_minimum,
};

inline constexpr std::size_t coarse_grid_points = 40;

/// int f_hat(x)^2 dx by adaptive trapezoid over [min(X) - 8h, max(X) + 8h],
/// relative tolerance 1e-6. Throws NumericError after 20 halvings.
double l2_norm_squared(const Sample& sample, double h, EstimatorKind kind);

/// CV(h) = int f_hat^2 - (2/n) sum_i f_hat_{-i}(X_i).
double cv_objective(const Sample& sample, double h);

/// MCV(h): the same construction on the bias-reduced estimator.
double mcv_objective(const Sample& sample, double h);

/// 1.06 * sd * n^(-1/5). Seeds the search range only.
double reference_bandwidth(const Sample& sample);

struct SearchRange
{
  double lo;
  double hi;
};

/// [0.1, 3] times the reference bandwidth.
SearchRange default_search_range(const Sample& sample);

/// Minimizes `objective` over [lo, hi]: a 40-point log-spaced grid followed by
/// golden-section search in the bracket around the chosen grid point, until
/// the bracket is narrower than 1e-4 h. The returned point is never worse
/// than the grid point it refines. `objective` in the result is set to
/// Objective::fixed; callers overwrite it.
BandwidthSelection minimize_bandwidth(const std::function<double(double)>& objective,
                                      double lo,
                                      double hi,
                                      GridRule rule = GridRule::global_minimum);

/// h_CV or h_MCV. Samples with tied observations use GridRule::interior_minimum.
BandwidthSelection select_bandwidth(const Sample& sample, Objective objective, double lo, double hi);

/// select_bandwidth over default_search_range.
BandwidthSelection select_bandwidth(const Sample& sample, Objective objective);

/// Wraps a caller-supplied h as a selection record.
BandwidthSelection fixed_bandwidth(double h);

} // namespace kldsel
