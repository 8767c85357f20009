#pragma once

// Reference computations written independently of the library, used as
// test oracles.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double
normal_pdf(double x, double mu = 0.0, double sigma = 1.0)
{
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double
phi(double u)
{
  return (3.0 - u * u) * std::exp(-0.5 * u * u) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
}

/// Composite Simpson rule with `panels` (even) panels.
inline double
simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels)
{
  if (panels % 2) {
    ++panels;
  }
  const double step = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) {
    s += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * step);
  }
  return s * step / 3.0;
}

/// Poisson pmf by running product, no log-gamma.
inline double
poisson_pmf(double lambda, int k)
{
  double p = std::exp(-lambda);
  for (int i = 1; i <= k; ++i) {
    p *= lambda / i;
  }
  return p;
}

inline double
kld(const std::vector<double>& p, const std::vector<double>& q)
{
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      d += p[i] * std::log(p[i] / q[i]);
    }
  }
  return d;
}

/// Uniform draw from the simplex of dimension m, bounded away from 0.
inline std::vector<double>
random_simplex(std::mt19937_64& gen, std::size_t m)
{
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(m);
  double total = 0.0;
  for (auto& x : p) {
    x = e(gen) + 1e-3;
    total += x;
  }
  for (auto& x : p) {
    x /= total;
  }
  return p;
}

inline std::vector<double>
normal_draws(std::mt19937_64& gen, std::size_t n)
{
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> xs(n);
  for (auto& x : xs) {
    x = d(gen);
  }
  return xs;
}

inline std::vector<double>
poisson_draws(std::mt19937_64& gen, std::size_t n, double lambda)
{
  std::poisson_distribution<int> d(lambda);
  std::vector<double> xs(n);
  for (auto& x : xs) {
    x = d(gen);
  }
  return xs;
}

inline std::vector<double>
geometric_draws(std::mt19937_64& gen, std::size_t n, double theta)
{
  // std::geometric_distribution counts failures; shift to {1, 2, ...}.
  std::geometric_distribution<int> d(theta);
  std::vector<double> xs(n);
  for (auto& x : xs) {
    x = d(gen) + 1;
  }
  return xs;
}

} // namespace oracle
