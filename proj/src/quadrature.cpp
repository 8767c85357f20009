#include "kldsel/quadrature.hpp"

#include "kldsel/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace kldsel::quadrature {

double
pairwise_sum(std::span<const double> xs)
{
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) {
      s += x;
    }
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

QuadratureResult
adaptive_trapezoid(const std::function<double(double)>& f,
                   double a,
                   double b,
                   std::size_t initial_panels,
                   double rel_tol,
                   double abs_tol,
                   int max_halvings)
{
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ParameterError("adaptive_trapezoid: need finite a < b");
  }
  if (initial_panels == 0) {
    initial_panels = 1;
  }

  std::size_t panels = initial_panels;
  double step = (b - a) / static_cast<double>(panels);
  std::vector<double> buf(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i) {
    buf[i] = f(a + static_cast<double>(i) * step);
  }
  buf.front() *= 0.5;
  buf.back() *= 0.5;
  double node_sum = pairwise_sum(buf);
  double estimate = step * node_sum;
  std::size_t nodes = panels + 1;

  for (int k = 1; k <= max_halvings; ++k) {
    // New nodes are the midpoints of the current panels.
    buf.assign(panels, 0.0);
    for (std::size_t i = 0; i < panels; ++i) {
      buf[i] = f(a + (static_cast<double>(i) + 0.5) * step);
    }
    node_sum += pairwise_sum(buf);
    nodes += panels;
    panels *= 2;
    step *= 0.5;
    const double refined = step * node_sum;
    if (!std::isfinite(refined)) {
      throw NumericError("adaptive_trapezoid: integrand produced a non-finite value");
    }
    if (std::abs(refined - estimate) <= rel_tol * std::abs(refined) + abs_tol) {
      return {refined, nodes, k};
    }
    estimate = refined;
  }
  throw NumericError("adaptive_trapezoid: no convergence after " +
                     std::to_string(max_halvings) + " halvings");
}

} // namespace kldsel::quadrature
