#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace kldsel::quadrature {

struct QuadratureResult
{
  double value;
  std::size_t nodes;
  int halvings;
};

/// Composite trapezoid on [a, b], halving the step (reusing previous nodes)
/// until two successive estimates differ by less than
/// rel_tol * |estimate| + abs_tol. At least one halving is always performed.
/// Throws NumericError if max_halvings is reached without convergence.
QuadratureResult adaptive_trapezoid(const std::function<double(double)>& f,
                                    double a,
                                    double b,
                                    std::size_t initial_panels,
                                    double rel_tol,
                                    double abs_tol = 0.0,
                                    int max_halvings = 20);

/// Pairwise (cascade) summation in index order. Deterministic for a given
/// input sequence and accurate to O(log n) ulps.
double pairwise_sum(std::span<const double> xs);

} // namespace kldsel::quadrature
