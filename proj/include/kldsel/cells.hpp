#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kldsel {

/// Shift used for integer data: the estimate's mass near an integer k is
/// collected in the cell holding k.
inline constexpr double count_offset = 0.5;

/// Partition of [0, inf) into M0 half-open cells [c_{i-1}, c_i), the last
/// one unbounded. Boundaries are 0 = c_0 < c_1 < ... < c_{M0-1}.
///
/// Continuous estimates are integrated over the shifted cells
/// [c_{i-1} - offset, c_i - offset); the offset must lie in [0, c_1).
class CellPartition
{
public:
  explicit CellPartition(std::vector<double> boundaries, double offset = 0.0);

  /// Eight cells [0,1), [1,2), ..., [6,7), [7, inf), offset 0.
  static CellPartition default_partition();

  CellPartition with_offset(double offset) const;
  double offset() const noexcept { return offset_; }

  std::size_t size() const noexcept { return boundaries_.size(); }
  std::span<const double> boundaries() const noexcept { return boundaries_; }
  double lower(std::size_t cell) const;
  /// +inf for the last cell.
  double upper(std::size_t cell) const;
  /// Zero-based index of the cell holding x; x must be >= 0.
  std::size_t cell_index(double x) const;

  bool operator==(const CellPartition&) const = default;

private:
  std::vector<double> boundaries_;
  double offset_ = 0.0;
};

/// Probability masses over a cell partition.
struct BinnedDistribution
{
  CellPartition cells;
  std::vector<double> masses;
};

/// Checks sizes, nonnegativity and sum-to-one within `tolerance`.
/// Throws ParameterError on violation.
void validate(const BinnedDistribution& dist, double tolerance = 1e-9);

/// Raises every mass to at least `floor` and rescales to sum 1.
/// Throws NumericError when every mass is at or below zero before flooring.
BinnedDistribution floor_and_renormalize(BinnedDistribution dist, double floor = 1e-12);

} // namespace kldsel
