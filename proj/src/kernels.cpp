#include "kldsel/kernels.hpp"

#include "kldsel/error.hpp"

#include <cmath>
#include <numbers>

namespace kldsel::kernels {

namespace {

void
require_finite(double u, const char* what)
{
  if (!std::isfinite(u)) {
    throw DomainError(std::string(what) + ": argument must be finite");
  }
}

} // namespace

namespace detail {

double
gauss(double u) noexcept
{
  return inv_sqrt_2pi * std::exp(-0.5 * u * u);
}

double
phi(double u) noexcept
{
  return 0.5 * (3.0 - u * u) * gauss(u);
}

} // namespace detail

double
kernel_value(double u)
{
  require_finite(u, "kernel_value");
  return detail::gauss(u);
}

double
kernel_second_derivative(double u)
{
  require_finite(u, "kernel_second_derivative");
  return (u * u - 1.0) * detail::gauss(u);
}

double
effective_kernel_value(double u)
{
  require_finite(u, "effective_kernel_value");
  return kernel_value(u) - 0.5 * kernel_constants().mu2 * kernel_second_derivative(u);
}

double
kernel_cdf(double u)
{
  if (std::isnan(u)) {
    throw DomainError("kernel_cdf: argument is NaN");
  }
  return 0.5 * std::erfc(-u / std::numbers::sqrt2);
}

double
effective_kernel_cdf(double u)
{
  if (std::isnan(u)) {
    throw DomainError("effective_kernel_cdf: argument is NaN");
  }
  if (std::isinf(u)) {
    return u > 0 ? 1.0 : 0.0;
  }
  return kernel_cdf(u) + 0.5 * u * detail::gauss(u);
}

KernelConstants
kernel_constants()
{
  const double inv_sqrt_pi = std::numbers::inv_sqrtpi;
  return KernelConstants{
    .mu2 = 1.0,
    .mu3 = 0.0,
    .l2_K = 0.5 * inv_sqrt_pi,
    .l2_Kpp = 3.0 / 8.0 * inv_sqrt_pi,
    .l2_phi = 6.75 / 8.0 * inv_sqrt_pi,
    .zeta = 1.0,
  };
}

} // namespace kldsel::kernels
