#include "kldsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kldsel::rng {

Stream::Stream(std::uint64_t seed, std::uint64_t index, Purpose purpose) noexcept
  : state_(mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(purpose)) + index))
{}

double
Stream::uniform() noexcept
{
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double
Stream::uniform_open() noexcept
{
  return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t
Stream::below(std::uint64_t n) noexcept
{
  std::uint64_t x = (*this)();
  __extension__ using u128 = unsigned __int128;
  u128 m = static_cast<u128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<u128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double
Stream::normal() noexcept
{
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  cached_normal_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

std::int64_t
Stream::poisson(double lambda) noexcept
{
  const double u = uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  std::int64_t x = 0;
  while (u > cdf) {
    ++x;
    p *= lambda / static_cast<double>(x);
    cdf += p;
    if (p == 0.0 && static_cast<double>(x) > lambda) {
      break; // cdf has saturated below u through rounding
    }
  }
  return x;
}

std::int64_t
Stream::geometric(double theta) noexcept
{
  const double u = uniform_open();
  const double x = std::ceil(std::log(u) / std::log1p(-theta));
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(x));
}

} // namespace kldsel::rng
