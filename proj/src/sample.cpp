#include "kldsel/sample.hpp"

#include "kldsel/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kldsel {

Sample::Sample(std::vector<double> values)
  : values_(std::move(values))
{
  if (values_.empty()) {
    throw ParameterError("sample must contain at least one observation");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ParameterError("sample value at position " + std::to_string(i) +
                           " is not finite");
    }
  }

  std::vector<double> sorted = values_;
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted) {
    if (!atoms_.empty() && atoms_.back().value == v) {
      atoms_.back().count += 1.0;
    } else {
      atoms_.push_back({v, 1.0});
    }
  }

  // Two-pass moments over the sorted atoms: independent of input order.
  const double n = static_cast<double>(values_.size());
  double sum = 0.0;
  for (const auto& a : atoms_) {
    sum += a.count * a.value;
  }
  mean_ = sum / n;
  double ss = 0.0;
  for (const auto& a : atoms_) {
    const double d = a.value - mean_;
    ss += a.count * d * d;
  }
  sd_ = values_.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

std::pair<std::size_t, std::size_t>
Sample::atoms_within(double lo, double hi) const
{
  auto first = std::lower_bound(atoms_.begin(), atoms_.end(), lo,
                                [](const Atom& a, double v) { return a.value < v; });
  auto last = std::upper_bound(first, atoms_.end(), hi,
                               [](double v, const Atom& a) { return v < a.value; });
  return {static_cast<std::size_t>(first - atoms_.begin()),
          static_cast<std::size_t>(last - atoms_.begin())};
}

Sample
sample_from_counts(std::span<const Atom> atoms)
{
  std::vector<double> values;
  for (const auto& a : atoms) {
    if (a.count < 0 || a.count != std::floor(a.count)) {
      throw ParameterError("atom counts must be nonnegative integers");
    }
    values.insert(values.end(), static_cast<std::size_t>(a.count), a.value);
  }
  return Sample(std::move(values));
}

} // namespace kldsel
