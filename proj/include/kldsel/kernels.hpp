#pragma once

namespace kldsel::kernels {

/// Moment and norm constants of a second-order kernel K and of the effective
/// bias-reduced kernel phi = K - (mu2/2) K''.
struct KernelConstants
{
  double mu2;    ///< int u^2 K(u) du
  double mu3;    ///< int u^3 K(u) du
  double l2_K;   ///< int K(u)^2 du
  double l2_Kpp; ///< int K''(u)^2 du
  double l2_phi; ///< int phi(u)^2 du
  double zeta;   ///< int phi(u) du
};

/// Standard normal density. Throws DomainError for non-finite u.
double kernel_value(double u);

/// K''(u) = (u^2 - 1) K(u).
double kernel_second_derivative(double u);

/// phi(u) = K(u) - (mu2/2) K''(u) = (3 - u^2) exp(-u^2/2) / (2 sqrt(2 pi)).
/// Negative for |u| > sqrt(3).
double effective_kernel_value(double u);

/// Antiderivative of K, i.e. the standard normal cdf.
double kernel_cdf(double u);

/// Antiderivative of phi: Phi(u) + u K(u) / 2. Tends to 0 and 1 at -inf, +inf.
double effective_kernel_cdf(double u);

/// Closed-form constants for the Gaussian kernel.
KernelConstants kernel_constants();

namespace detail {

// Unchecked versions for inner loops; callers guarantee finite input.
inline constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;

double gauss(double u) noexcept;
double phi(double u) noexcept;

} // namespace detail

} // namespace kldsel::kernels
