#include "kldsel/density.hpp"

#include "kldsel/error.hpp"
#include "kldsel/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace kldsel {

namespace {

// exp(-u^2/2) underflows to exactly zero beyond this, so atoms further away
// contribute nothing and can be skipped without changing any sum.
constexpr double kernel_support = 39.0;

void
check_bandwidth(double h)
{
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ParameterError("bandwidth must be positive and finite, got " + std::to_string(h));
  }
}

void
check_point(double x)
{
  if (!std::isfinite(x)) {
    throw DomainError("evaluation point must be finite");
  }
}

template<class Kernel>
double
kernel_sum(const Sample& sample, double h, double x, Kernel kernel)
{
  const auto [first, last] =
    sample.atoms_within(x - kernel_support * h, x + kernel_support * h);
  const auto atoms = sample.atoms();
  double s = 0.0;
  for (std::size_t j = first; j < last; ++j) {
    s += atoms[j].count * kernel((x - atoms[j].value) / h);
  }
  return s;
}

double
kernel_at(double u, EstimatorKind kind) noexcept
{
  return kind == EstimatorKind::classical ? kernels::detail::gauss(u)
                                          : kernels::detail::phi(u);
}

// Upper-tail forms avoid cancellation when both limits lie right of an atom.
double
kernel_ccdf(double u, EstimatorKind kind)
{
  const double tail = 0.5 * std::erfc(u / std::numbers::sqrt2);
  if (kind == EstimatorKind::classical) {
    return tail;
  }
  return tail - 0.5 * u * kernels::detail::gauss(u);
}

double
kernel_cdf(double u, EstimatorKind kind)
{
  return kind == EstimatorKind::classical ? kernels::kernel_cdf(u)
                                          : kernels::effective_kernel_cdf(u);
}

double
kernel_mass(double a, double b, EstimatorKind kind)
{
  if (a >= 0.0) {
    const double ca = std::isinf(a) ? 0.0 : kernel_ccdf(a, kind);
    const double cb = std::isinf(b) ? 0.0 : kernel_ccdf(b, kind);
    return ca - cb;
  }
  const double ca = std::isinf(a) ? 0.0 : kernel_cdf(a, kind);
  const double cb = std::isinf(b) ? 1.0 : kernel_cdf(b, kind);
  return cb - ca;
}

} // namespace

const char*
to_string(EstimatorKind kind) noexcept
{
  return kind == EstimatorKind::classical ? "classical" : "bias_reduced";
}

double
kde_at(const Sample& sample, double h, double x)
{
  return estimate_at(sample, h, x, EstimatorKind::classical);
}

double
bkde_at(const Sample& sample, double h, double x)
{
  return estimate_at(sample, h, x, EstimatorKind::bias_reduced);
}

double
estimate_at(const Sample& sample, double h, double x, EstimatorKind kind)
{
  check_bandwidth(h);
  check_point(x);
  const double n = static_cast<double>(sample.size());
  const double s = kernel_sum(sample, h, x, [kind](double u) { return kernel_at(u, kind); });
  return s / (n * h);
}

namespace {

double
loo_at(const Sample& sample, double h, std::size_t i, double x, EstimatorKind kind)
{
  check_bandwidth(h);
  check_point(x);
  if (sample.size() < 2) {
    throw ParameterError("leave-one-out estimate needs at least two observations");
  }
  if (i >= sample.size()) {
    throw ParameterError("leave-one-out index " + std::to_string(i) + " out of range");
  }
  const double s = kernel_sum(sample, h, x, [kind](double u) { return kernel_at(u, kind); }) -
                   kernel_at((x - sample[i]) / h, kind);
  return s / (static_cast<double>(sample.size() - 1) * h);
}

} // namespace

double
bkde_loo_at(const Sample& sample, double h, std::size_t i, double x)
{
  return loo_at(sample, h, i, x, EstimatorKind::bias_reduced);
}

double
kde_loo_at(const Sample& sample, double h, std::size_t i, double x)
{
  return loo_at(sample, h, i, x, EstimatorKind::classical);
}

double
loo_sum(const Sample& sample, double h, EstimatorKind kind)
{
  check_bandwidth(h);
  if (sample.size() < 2) {
    throw ParameterError("leave-one-out sum needs at least two observations");
  }
  // sum_i sum_{j != i} k((X_i - X_j)/h) = sum_{a,b} c_a c_b k((a - b)/h) - n k(0)
  double pairs = 0.0;
  for (const auto& a : sample.atoms()) {
    pairs += a.count *
             kernel_sum(sample, h, a.value, [kind](double u) { return kernel_at(u, kind); });
  }
  const double n = static_cast<double>(sample.size());
  pairs -= n * kernel_at(0.0, kind);
  return pairs / ((n - 1.0) * h);
}

double
integrate_estimate(const Sample& sample, double h, double lo, double hi, EstimatorKind kind)
{
  check_bandwidth(h);
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw ParameterError("integration bounds must satisfy lo <= hi");
  }
  if (lo == hi) {
    return 0.0;
  }
  double s = 0.0;
  for (const auto& a : sample.atoms()) {
    s += a.count * kernel_mass((lo - a.value) / h, (hi - a.value) / h, kind);
  }
  return s / static_cast<double>(sample.size());
}

DensityEstimate
evaluate_on_grid(const Sample& sample, double h, std::span<const double> grid, EstimatorKind kind)
{
  check_bandwidth(h);
  if (grid.empty()) {
    throw ParameterError("evaluation grid must be nonempty");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ParameterError("evaluation grid must be strictly increasing");
    }
  }
  DensityEstimate est{std::vector<double>(grid.begin(), grid.end()), {}, h, kind};
  est.values.reserve(grid.size());
  for (double x : grid) {
    est.values.push_back(estimate_at(sample, h, x, kind));
  }
  return est;
}

std::vector<double>
default_grid(const Sample& sample, double h, std::size_t points)
{
  check_bandwidth(h);
  if (points < 2) {
    throw ParameterError("default grid needs at least two points");
  }
  const double lo = sample.min() - 4.0 * h;
  const double hi = sample.max() + 4.0 * h;
  std::vector<double> grid(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + static_cast<double>(i) * step;
  }
  grid.back() = hi;
  return grid;
}

} // namespace kldsel
