#include "kldsel/cells.hpp"

#include "kldsel/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kldsel {

CellPartition::CellPartition(std::vector<double> boundaries, double offset)
  : boundaries_(std::move(boundaries))
  , offset_(offset)
{
  if (boundaries_.size() < 2) {
    throw ParameterError("a cell partition needs at least two cells");
  }
  if (boundaries_.front() != 0.0) {
    throw ParameterError("the first cell boundary must be 0");
  }
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (!std::isfinite(boundaries_[i]) || !(boundaries_[i] > boundaries_[i - 1])) {
      throw ParameterError("cell boundaries must be finite and strictly increasing");
    }
  }
  if (!(offset_ >= 0.0 && offset_ < boundaries_[1])) {
    throw ParameterError("cell offset must lie in [0, c_1)");
  }
}

CellPartition
CellPartition::with_offset(double offset) const
{
  return CellPartition(boundaries_, offset);
}

CellPartition
CellPartition::default_partition()
{
  return CellPartition({0, 1, 2, 3, 4, 5, 6, 7});
}

double
CellPartition::lower(std::size_t cell) const
{
  if (cell >= size()) {
    throw ParameterError("cell index out of range");
  }
  return boundaries_[cell];
}

double
CellPartition::upper(std::size_t cell) const
{
  if (cell >= size()) {
    throw ParameterError("cell index out of range");
  }
  return cell + 1 == size() ? std::numeric_limits<double>::infinity() : boundaries_[cell + 1];
}

std::size_t
CellPartition::cell_index(double x) const
{
  if (!(x >= 0.0)) {
    throw DomainError("value " + std::to_string(x) + " lies outside the partition [0, inf)");
  }
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
  return static_cast<std::size_t>(it - boundaries_.begin()) - 1;
}

void
validate(const BinnedDistribution& dist, double tolerance)
{
  if (dist.masses.size() != dist.cells.size()) {
    throw ParameterError("binned distribution has " + std::to_string(dist.masses.size()) +
                         " masses for " + std::to_string(dist.cells.size()) + " cells");
  }
  double total = 0.0;
  for (double m : dist.masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw ParameterError("binned masses must be finite and nonnegative");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > tolerance) {
    throw ParameterError("binned masses sum to " + std::to_string(total) + ", not 1");
  }
}

BinnedDistribution
floor_and_renormalize(BinnedDistribution dist, double floor)
{
  if (std::none_of(dist.masses.begin(), dist.masses.end(), [](double m) { return m > 0.0; })) {
    throw NumericError("all cell masses are non-positive");
  }
  double total = 0.0;
  for (double& m : dist.masses) {
    m = std::max(m, floor);
    total += m;
  }
  for (double& m : dist.masses) {
    m /= total;
  }
  return dist;
}

} // namespace kldsel
