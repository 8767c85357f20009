#pragma once

#include <cstdint>
#include <limits>

namespace kldsel::rng {

/// Purpose tags keep streams for different jobs disjoint under one seed.
enum class Purpose : std::uint64_t
{
  sampling = 0x5a17,
  bootstrap = 0xb007,
  rate = 0x7a7e,
};

/// SplitMix64 output function.
constexpr std::uint64_t
mix64(std::uint64_t z) noexcept
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 generator keyed by (seed, index, purpose). Streams with
/// different keys start at unrelated points of the 2^64 cycle, so a
/// replication's draws depend only on its own key and never on scheduling.
class Stream
{
public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t index, Purpose purpose) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept
  {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  /// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via Box-Muller; caches the second variate.
  double normal() noexcept;

  /// Poisson(lambda) by sequential search on the cdf.
  std::int64_t poisson(double lambda) noexcept;
  /// Geometric(theta) on {1, 2, ...}: ceil(ln U / ln(1 - theta)).
  std::int64_t geometric(double theta) noexcept;

private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

} // namespace kldsel::rng
