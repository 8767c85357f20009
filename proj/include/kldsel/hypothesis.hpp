#pragma once

#include "kldsel/cells.hpp"
#include "kldsel/models.hpp"
#include "kldsel/sample.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kldsel {

enum class Decision
{
  model_1,    ///< KL_n significantly negative
  model_2,    ///< KL_n significantly positive
  indecisive, ///< |KL_n| within the critical value
  reject,     ///< goodness of fit rejected
  no_reject,
  withheld, ///< scale estimate degenerate; no decision made
};

const char* to_string(Decision decision) noexcept;

/// Scale estimates below this are treated as zero.
inline constexpr double degenerate_scale = 1e-10;

struct TestResult
{
  double statistic;
  double scale;   ///< xi_hat or Lambda_phi_hat
  double p_value; ///< two-sided standard normal tail
  double alpha;
  Decision decision;
  bool degenerate;
};

/// Partial derivatives of D(p, q) = sum p_i ln(p_i / q_i).
struct GradientPair
{
  std::vector<double> u; ///< d/dp_i = ln(p_i / q_i) + 1
  std::vector<double> s; ///< d/dq_i = -p_i / q_i
};

/// q is floored at 1e-12 and renormalized; p is floored at 1e-12 inside the
/// log only.
GradientPair divergence_gradients(const BinnedDistribution& p, const BinnedDistribution& q);

/// z_{1 - alpha/2}.
double critical_value(double alpha);

/// |statistic| <= z is indecisive; below -z selects model_1, above z model_2.
Decision decide(double statistic, double alpha);

struct ScaleEstimate
{
  /// sqrt(n) * sd of D(model 1) - D(model 2); 0 when only one family given.
  double xi_hat = 0.0;
  /// sqrt(n) * sd of each model's divergence.
  std::vector<double> lambda_phi_hat;
  std::size_t resamples_used = 0;
  std::size_t degenerate_resamples = 0;
  /// xi_hat below degenerate_scale (two families) or lambda below it (one).
  bool degenerate = false;
};

struct BootstrapOptions
{
  std::size_t resamples = 500;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Nonparametric bootstrap of the binned divergences. Each resample draws n
/// observations with replacement (stream keyed by (seed, resample index)),
/// refits every family by maximum likelihood and recomputes the
/// bias-reduced cell masses with h held fixed. Resamples with a degenerate
/// fit are skipped. Throws NumericError when all are skipped and
/// ParameterError for B < 100, n < 2 or no families.
ScaleEstimate bootstrap_scale(const Sample& sample,
                              double h,
                              std::span<const Family> families,
                              const CellPartition& cells,
                              const BootstrapOptions& options);

/// Plug-in comparison: Lambda_11 = diag(F) - F F^T on the empirical cell
/// frequencies, model blocks diag(F_theta) - F_theta F_theta^T, cross
/// blocks zero. For comparison with the bootstrap only.
ScaleEstimate plugin_scale(const Sample& sample,
                           double h,
                           std::span<const Family> families,
                           const CellPartition& cells);

/// KL_n = sqrt(n) / xi_hat * [D(F_b, model_1) - D(F_b, model_2)].
/// Negative favours model_1. Throws ParameterError for xi_hat <= 0.
double kl_n_statistic(const Sample& sample,
                      double h,
                      const CellPartition& cells,
                      const ParametricModel& model_1,
                      const ParametricModel& model_2,
                      double xi_hat);

/// KL_n with its decision; a degenerate xi_hat withholds the decision.
TestResult kl_n_test(const Sample& sample,
                     double h,
                     const CellPartition& cells,
                     const ParametricModel& model_1,
                     const ParametricModel& model_2,
                     double xi_hat,
                     double alpha);

/// sqrt(n) D(F_b, F_model) / Lambda_phi_hat, two-sided normal test of D = 0.
TestResult gof_statistic(const Sample& sample,
                         double h,
                         const CellPartition& cells,
                         const ParametricModel& model,
                         double lambda_phi_hat,
                         double alpha);

} // namespace kldsel
