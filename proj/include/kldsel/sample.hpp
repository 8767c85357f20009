#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kldsel {

/// A distinct observed value and its multiplicity.
struct Atom
{
  double value;
  double count;
};

/// Ordered collection of finite observations, n >= 1.
///
/// Besides the raw values (kept in input order so leave-one-out indices refer
/// to the caller's positions) the sample keeps its distinct values sorted
/// with multiplicities. Estimators sum over atoms, so results do not depend
/// on the input order and tied data (integer counts) is evaluated in
/// O(distinct values).
class Sample
{
public:
  explicit Sample(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double min() const noexcept { return atoms_.front().value; }
  double max() const noexcept { return atoms_.back().value; }
  bool has_ties() const noexcept { return atoms_.size() < values_.size(); }

  double mean() const noexcept { return mean_; }
  /// Sample standard deviation with n - 1 denominator; 0 when n == 1.
  double sd() const noexcept { return sd_; }

  /// Half-open index range [first, last) of atoms with value in [lo, hi].
  std::pair<std::size_t, std::size_t> atoms_within(double lo, double hi) const;

private:
  std::vector<double> values_;
  std::vector<Atom> atoms_;
  double mean_ = 0.0;
  double sd_ = 0.0;
};

/// Builds a sample whose atoms carry arbitrary nonnegative counts, e.g. a
/// bootstrap resample expressed as multiplicities over the original atoms.
/// Atoms with zero count are dropped.
Sample sample_from_counts(std::span<const Atom> atoms);

} // namespace kldsel
