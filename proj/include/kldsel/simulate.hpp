#pragma once

#include "kldsel/bandwidth.hpp"
#include "kldsel/cells.hpp"
#include "kldsel/density.hpp"
#include "kldsel/hypothesis.hpp"
#include "kldsel/rng.hpp"
#include "kldsel/sample.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kldsel {

inline constexpr double dgp_poisson_rate = 9.0;
inline constexpr double dgp_geometric_prob = 0.1;

struct BandwidthPolicy
{
  /// cv or mcv select h per sample; fixed uses `fixed_h` for both estimators.
  Objective objective = Objective::mcv;
  double fixed_h = 0.0;
};

struct ExperimentConfig
{
  double pi = 1.0; ///< weight of Poisson(9) in the mixture
  std::size_t n = 250;
  std::size_t reps = 200;
  double alpha = 0.05;
  std::uint64_t seed = 42;
  BandwidthPolicy bandwidth;
  std::size_t bootstrap = 500;
  CellPartition cells = CellPartition::default_partition().with_offset(count_offset);
  /// 0 = KLDSEL_THREADS or hardware concurrency.
  unsigned threads = 0;
};

/// Throws ParameterError unless pi in [0,1], n >= 2, reps >= 1,
/// alpha in (0,1), B >= 100 and a fixed policy carries h > 0.
void validate(const ExperimentConfig& config);

/// Draws from pi * Poisson(9) + (1 - pi) * Geometric(0.1).
Sample sample_mixture(double pi, std::size_t n, rng::Stream& stream);

/// One Monte Carlo replication. model_1 is the Poisson family, model_2 the
/// geometric family. Divergences are binned over config.cells; the MKLD
/// pair uses the same boundaries with offset 0, and again with config's
/// offset for mkld_shifted.
struct ReplicationRecord
{
  std::size_t rep_index = 0;
  double h_bias_reduced = 0.0; ///< h for the bias-reduced estimate (MCV by default)
  double h_classical = 0.0;    ///< h for the classical estimate (CV by default)
  double lambda_hat = 0.0;
  double theta_hat = 0.0;
  bool support_violation = false;
  double d_poisson = 0.0;   ///< D(F_b, F_lambda_hat)
  double d_geometric = 0.0; ///< D(F_b, F_theta_hat)
  double n_d_poisson = 0.0;
  double n_d_geometric = 0.0;
  double d_classical_geometric = 0.0;     ///< D(F_classical, F_theta_hat), offset 0
  double d_bias_reduced_geometric = 0.0;  ///< D(F_b, F_theta_hat), offset 0
  double mkld = 0.0;                      ///< d_bias_reduced_geometric / d_classical_geometric
  double mkld_shifted = 0.0;
  double xi_hat = 0.0;
  double kl_n = 0.0;
  Decision decision = Decision::withheld;
  /// Degenerate MLE or scale estimate; fields that could not be computed
  /// hold NaN and the decision is withheld.
  bool degenerate = false;
};

/// Deterministic in (config.seed, rep_index).
ReplicationRecord run_replication(const ExperimentConfig& config, std::size_t rep_index);

/// Mean and sd (n - 1 denominator) over the finite values.
struct Moments
{
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

Moments moments(std::span<const double> values);

struct SelectionReport
{
  ExperimentConfig config;
  Moments lambda_hat;
  Moments theta_hat;
  Moments d_poisson;
  Moments d_geometric;
  Moments n_d_poisson;
  Moments n_d_geometric;
  Moments d_classical_geometric;
  Moments d_bias_reduced_geometric;
  Moments mkld;
  Moments mkld_shifted;
  Moments xi_hat;
  Moments kl_n;
  Moments h_bias_reduced;
  Moments h_classical;
  /// Percentages over all replications; withheld decisions count as
  /// indecisive.
  double pct_model_1 = 0.0;
  double pct_model_2 = 0.0;
  double pct_indecisive = 0.0;
  std::size_t degenerate = 0;
  std::size_t support_violations = 0;
  std::vector<ReplicationRecord> records;
};

/// Runs config.reps replications (in parallel) and folds them in rep order.
/// Throws NumericError when more than half the records are degenerate.
SelectionReport run_experiment(const ExperimentConfig& config);

struct RatePoint
{
  std::size_t n;
  double h;
  double mse;
};

struct RateResult
{
  EstimatorKind kind;
  std::vector<RatePoint> points;
  double slope; ///< least-squares slope of log MSE on log n
};

/// Monte Carlo MSE of the estimate at x0 for standard normal data, with
/// h = n^(-1/9) (bias-reduced) or n^(-1/5) (classical). Both kinds see the
/// same draws for a given seed. Needs >= 4 distinct sizes and reps >= 200.
RateResult mse_rate_experiment(std::span<const std::size_t> n_list,
                               std::size_t reps,
                               double x0,
                               std::uint64_t seed,
                               EstimatorKind kind = EstimatorKind::bias_reduced,
                               unsigned threads = 0);

/// One row per integer value from 0 to max(X): observed count and fitted
/// model pmfs, for histogram overlays.
struct HistogramRow
{
  std::int64_t value;
  std::size_t count;
  double frequency;
  double poisson_pmf;
  double geometric_pmf;
};

std::vector<HistogramRow> histogram_overlay(const Sample& sample);

} // namespace kldsel
