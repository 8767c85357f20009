#pragma once

#include "kldsel/sample.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace kldsel {

enum class EstimatorKind
{
  classical,
  bias_reduced,
};

const char* to_string(EstimatorKind kind) noexcept;

/// Estimated density on a grid. Values of a bias-reduced estimate may be
/// negative.
struct DensityEstimate
{
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth;
  EstimatorKind kind;
};

/// Rosenblatt-Parzen estimate (1 / nh) sum_i K((x - X_i) / h).
double kde_at(const Sample& sample, double h, double x);

/// Bias-reduced estimate f - (h^2 / 2) mu2 f'', i.e. the plain average of the
/// effective kernel phi = K - (mu2 / 2) K''.
double bkde_at(const Sample& sample, double h, double x);

/// Either of the above.
double estimate_at(const Sample& sample, double h, double x, EstimatorKind kind);

/// Bias-reduced estimate with observation i (input position) removed.
double bkde_loo_at(const Sample& sample, double h, std::size_t i, double x);

/// Classical estimate with observation i removed.
double kde_loo_at(const Sample& sample, double h, std::size_t i, double x);

/// sum_i f_{-i}(X_i): the leave-one-out term of the cross-validation
/// criteria. Requires n >= 2.
double loo_sum(const Sample& sample, double h, EstimatorKind kind);

/// Exact integral of the estimate over [lo, hi] (either bound may be
/// infinite), via the kernel antiderivatives.
double integrate_estimate(const Sample& sample, double h, double lo, double hi, EstimatorKind kind);

DensityEstimate evaluate_on_grid(const Sample& sample,
                                 double h,
                                 std::span<const double> grid,
                                 EstimatorKind kind);

/// `points` equally spaced points over [min(X) - 4h, max(X) + 4h].
std::vector<double> default_grid(const Sample& sample, double h, std::size_t points = 512);

} // namespace kldsel
