#pragma once

#include "kldsel/cells.hpp"
#include "kldsel/density.hpp"
#include "kldsel/sample.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace kldsel {

enum class Family
{
  poisson,
  geometric,
};

const char* to_string(Family family) noexcept;

/// A candidate count model: Poisson(lambda), lambda > 0, or Geometric(theta)
/// on {1, 2, ...}, 0 < theta < 1.
struct ParametricModel
{
  Family family;
  double parameter;
};

/// Throws ParameterError when the parameter is outside the family's range.
ParametricModel make_model(Family family, double parameter);

/// Probability of the count x >= 0. Evaluated in log space.
double model_pmf(const ParametricModel& model, std::int64_t x);

struct MleFit
{
  Family family;
  double estimate;
  /// lambda_hat = 0 or theta_hat >= 1: the estimate is on the boundary of
  /// the parameter space and model() is unavailable.
  bool degenerate = false;
  /// Some observations lie outside the family's support (a 0 under the
  /// geometric family); only set when MleOptions::strict_support is false.
  bool support_violation = false;

  /// Throws NumericError for a degenerate fit.
  ParametricModel model() const;
};

struct MleOptions
{
  /// Reject samples containing observations outside the family's support.
  /// When false the closed-form estimator is applied as is and the fit is
  /// flagged instead.
  bool strict_support = true;
};

/// lambda_hat = mean; theta_hat = n / (n + sum(x_i - 1)).
/// Observations must be nonnegative integers (DomainError otherwise).
MleFit fit_mle(Family family, const Sample& sample, MleOptions options = {});

/// Cell i gets the pmf summed over the integers in [c_{i-1}, c_i); the last
/// cell gets 1 minus the rest.
BinnedDistribution model_cell_probs(const ParametricModel& model, const CellPartition& cells);

/// Per-atom integrals of the kernel over each cell, scaled so that
/// cell masses of any reweighting of the atoms are a dot product.
class CellKernelMasses
{
public:
  CellKernelMasses(std::span<const Atom> atoms,
                   double h,
                   const CellPartition& cells,
                   EstimatorKind kind,
                   double last_cell_upper);

  /// Unfloored masses for atom weights summing to 1.
  std::vector<double> masses(std::span<const double> weights) const;

  std::size_t atom_count() const noexcept { return atoms_; }
  const CellPartition& cells() const noexcept { return cells_; }

private:
  std::size_t atoms_;
  CellPartition cells_;
  std::vector<double> table_; // atoms x cells, row major
};

/// Cell masses of a kernel estimate: the estimate integrated over each
/// shifted cell (last cell up to max(X) + 8h), floored at 1e-12 and
/// renormalized. Mass below the first shifted boundary is dropped.
BinnedDistribution kde_cell_probs(const Sample& sample,
                                  double h,
                                  const CellPartition& cells,
                                  EstimatorKind kind);

/// kde_cell_probs for the bias-reduced estimate.
BinnedDistribution bkde_cell_probs(const Sample& sample, double h, const CellPartition& cells);

/// Relative frequency of observations per cell.
BinnedDistribution empirical_cell_freqs(const Sample& sample, const CellPartition& cells);

} // namespace kldsel
