#pragma once

#include "kldsel/cells.hpp"
#include "kldsel/sample.hpp"

#include <cstddef>
#include <functional>

namespace kldsel {

/// Truncated continuous divergence estimate and its quadrature metadata.
struct DivergenceEstimate
{
  double value;       ///< nats
  double epsilon_n;   ///< truncation threshold
  double active_mass; ///< integral of the estimate over the active set
  double domain_lo;
  double domain_hi;
  std::size_t nodes; ///< quadrature nodes at the accepted refinement
};

/// eps_n = n^(-1/4).
double threshold_epsilon(std::size_t n);

/// int_{A} f_b(x) ln(f_b(x) / model_pdf(x)) dx with A = {x : f_b(x) >= epsilon}
/// and f_b the bias-reduced estimate. The signed comparison keeps negative
/// regions of f_b out of A.
///
/// Composite trapezoid over [min(X) - 8h, max(X) + 8h]; panels that cross
/// the threshold are cut at the linearly interpolated crossing point so the
/// rule stays second order. The step is halved until successive values
/// agree to 1e-5 relative. Throws DomainError if model_pdf is not positive
/// and finite at an active node.
DivergenceEstimate kld_continuous(const Sample& sample,
                                  double h,
                                  const std::function<double(double)>& model_pdf,
                                  double epsilon);

/// sum_i p_i ln(p_i / q_i), with 0 ln(0 / q) = 0. q is floored at 1e-12 and
/// renormalized first. Throws ParameterError for mismatched partitions.
double kld_discrete(const BinnedDistribution& p, const BinnedDistribution& q);

/// d_bias_reduced / d_classical; below 1 means the bias-reduced estimate sits
/// closer to the model. Throws ParameterError when d_classical <= 0.
double mkld_ratio(double d_bias_reduced, double d_classical);

inline constexpr double model_mass_floor = 1e-12;

} // namespace kldsel
