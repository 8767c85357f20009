#include "kldsel/simulate.hpp"

#include "kldsel/divergence.hpp"
#include "kldsel/error.hpp"
#include "kldsel/models.hpp"
#include "kldsel/parallel.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace kldsel {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

} // namespace

void
validate(const ExperimentConfig& config)
{
  if (!(config.pi >= 0.0 && config.pi <= 1.0)) {
    throw ParameterError("mixture weight pi must lie in [0, 1]");
  }
  if (config.n < 2) {
    throw ParameterError("sample size must be at least 2");
  }
  if (config.reps < 1) {
    throw ParameterError("at least one replication is required");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw ParameterError("alpha must lie in (0, 1)");
  }
  if (config.bootstrap < 100) {
    throw ParameterError("bootstrap needs at least 100 resamples");
  }
  if (config.bandwidth.objective == Objective::fixed &&
      !(config.bandwidth.fixed_h > 0.0 && std::isfinite(config.bandwidth.fixed_h))) {
    throw ParameterError("fixed bandwidth policy needs h > 0");
  }
}

Sample
sample_mixture(double pi, std::size_t n, rng::Stream& stream)
{
  if (!(pi >= 0.0 && pi <= 1.0)) {
    throw ParameterError("mixture weight pi must lie in [0, 1]");
  }
  if (n < 1) {
    throw ParameterError("sample size must be at least 1");
  }
  std::vector<double> values(n);
  for (auto& v : values) {
    const bool poisson = stream.uniform() < pi;
    v = static_cast<double>(poisson ? stream.poisson(dgp_poisson_rate)
                                    : stream.geometric(dgp_geometric_prob));
  }
  return Sample(std::move(values));
}

ReplicationRecord
run_replication(const ExperimentConfig& config, std::size_t rep_index)
{
  validate(config);
  rng::Stream stream(config.seed, rep_index, rng::Purpose::sampling);
  const Sample sample = sample_mixture(config.pi, config.n, stream);
  const double n = static_cast<double>(config.n);

  ReplicationRecord rec;
  rec.rep_index = rep_index;

  const MleFit poisson = fit_mle(Family::poisson, sample);
  const MleFit geometric = fit_mle(Family::geometric, sample, {.strict_support = false});
  rec.lambda_hat = poisson.estimate;
  rec.theta_hat = geometric.estimate;
  rec.support_violation = geometric.support_violation;

  if (config.bandwidth.objective == Objective::fixed) {
    rec.h_bias_reduced = config.bandwidth.fixed_h;
    rec.h_classical = config.bandwidth.fixed_h;
  } else if (!(sample.sd() > 0.0)) {
    // All observations equal: no search range, nothing to select.
    rec.degenerate = true;
  } else {
    rec.h_bias_reduced = select_bandwidth(sample, config.bandwidth.objective).h_star;
    rec.h_classical = select_bandwidth(sample, Objective::cv).h_star;
  }

  if (poisson.degenerate || geometric.degenerate || rec.degenerate) {
    rec.degenerate = true;
    rec.d_poisson = rec.d_geometric = rec.n_d_poisson = rec.n_d_geometric = nan;
    rec.d_classical_geometric = rec.d_bias_reduced_geometric = nan;
    rec.mkld = rec.mkld_shifted = rec.xi_hat = rec.kl_n = nan;
    rec.decision = Decision::withheld;
    return rec;
  }

  const CellPartition& cells = config.cells;
  const ParametricModel model_p = poisson.model();
  const ParametricModel model_g = geometric.model();
  const BinnedDistribution q_p = model_cell_probs(model_p, cells);
  const BinnedDistribution q_g = model_cell_probs(model_g, cells);

  const BinnedDistribution f_b = bkde_cell_probs(sample, rec.h_bias_reduced, cells);
  rec.d_poisson = kld_discrete(f_b, q_p);
  rec.d_geometric = kld_discrete(f_b, q_g);
  rec.n_d_poisson = n * rec.d_poisson;
  rec.n_d_geometric = n * rec.d_geometric;

  const CellPartition literal = cells.with_offset(0.0);
  const BinnedDistribution q_g_literal = model_cell_probs(model_g, literal);
  rec.d_classical_geometric = kld_discrete(
    kde_cell_probs(sample, rec.h_classical, literal, EstimatorKind::classical), q_g_literal);
  rec.d_bias_reduced_geometric =
    kld_discrete(bkde_cell_probs(sample, rec.h_bias_reduced, literal), q_g_literal);
  rec.mkld = rec.d_classical_geometric > 0.0
               ? mkld_ratio(rec.d_bias_reduced_geometric, rec.d_classical_geometric)
               : nan;
  const double d_classical_shifted = kld_discrete(
    kde_cell_probs(sample, rec.h_classical, cells, EstimatorKind::classical), q_g);
  rec.mkld_shifted = d_classical_shifted > 0.0 ? mkld_ratio(rec.d_geometric, d_classical_shifted) : nan;

  constexpr std::array families{Family::poisson, Family::geometric};
  const BootstrapOptions boot{
    .resamples = config.bootstrap,
    .seed = rng::mix64(config.seed ^ rng::mix64(rep_index)),
    .threads = 1,
  };
  const ScaleEstimate scale = bootstrap_scale(sample, rec.h_bias_reduced, families, cells, boot);
  rec.xi_hat = scale.xi_hat;

  const TestResult test =
    kl_n_test(sample, rec.h_bias_reduced, cells, model_p, model_g, scale.xi_hat, config.alpha);
  rec.kl_n = test.statistic;
  rec.decision = test.decision;
  rec.degenerate = test.degenerate;
  return rec;
}

Moments
moments(std::span<const double> values)
{
  Moments m;
  double sum = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++m.count;
    }
  }
  if (m.count == 0) {
    m.mean = m.sd = nan;
    return m;
  }
  m.mean = sum / static_cast<double>(m.count);
  double ss = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) {
      ss += (v - m.mean) * (v - m.mean);
    }
  }
  m.sd = m.count > 1 ? std::sqrt(ss / static_cast<double>(m.count - 1)) : 0.0;
  return m;
}

SelectionReport
run_experiment(const ExperimentConfig& config)
{
  validate(config);
  SelectionReport report;
  report.config = config;
  report.records.resize(config.reps);
  parallel_for(config.reps, resolve_threads(config.threads), [&](std::size_t r) {
    report.records[r] = run_replication(config, r);
  });

  auto column = [&](double ReplicationRecord::*field) {
    std::vector<double> xs;
    xs.reserve(report.records.size());
    for (const auto& rec : report.records) {
      xs.push_back(rec.*field);
    }
    return moments(xs);
  };
  report.lambda_hat = column(&ReplicationRecord::lambda_hat);
  report.theta_hat = column(&ReplicationRecord::theta_hat);
  report.d_poisson = column(&ReplicationRecord::d_poisson);
  report.d_geometric = column(&ReplicationRecord::d_geometric);
  report.n_d_poisson = column(&ReplicationRecord::n_d_poisson);
  report.n_d_geometric = column(&ReplicationRecord::n_d_geometric);
  report.d_classical_geometric = column(&ReplicationRecord::d_classical_geometric);
  report.d_bias_reduced_geometric = column(&ReplicationRecord::d_bias_reduced_geometric);
  report.mkld = column(&ReplicationRecord::mkld);
  report.mkld_shifted = column(&ReplicationRecord::mkld_shifted);
  report.xi_hat = column(&ReplicationRecord::xi_hat);
  report.kl_n = column(&ReplicationRecord::kl_n);
  report.h_bias_reduced = column(&ReplicationRecord::h_bias_reduced);
  report.h_classical = column(&ReplicationRecord::h_classical);

  std::size_t first = 0;
  std::size_t second = 0;
  for (const auto& rec : report.records) {
    first += rec.decision == Decision::model_1;
    second += rec.decision == Decision::model_2;
    report.degenerate += rec.degenerate;
    report.support_violations += rec.support_violation;
  }
  const double reps = static_cast<double>(config.reps);
  report.pct_model_1 = 100.0 * static_cast<double>(first) / reps;
  report.pct_model_2 = 100.0 * static_cast<double>(second) / reps;
  report.pct_indecisive = 100.0 * static_cast<double>(config.reps - first - second) / reps;

  if (2 * report.degenerate > config.reps) {
    throw NumericError("more than half of the replications are degenerate (" +
                       std::to_string(report.degenerate) + " of " +
                       std::to_string(config.reps) + ")");
  }
  return report;
}

RateResult
mse_rate_experiment(std::span<const std::size_t> n_list,
                    std::size_t reps,
                    double x0,
                    std::uint64_t seed,
                    EstimatorKind kind,
                    unsigned threads)
{
  const std::set<std::size_t> distinct(n_list.begin(), n_list.end());
  if (distinct.size() < 4) {
    throw ParameterError("rate experiment needs at least four distinct sample sizes");
  }
  if (distinct.count(0) || distinct.count(1)) {
    throw ParameterError("rate experiment sample sizes must be at least 2");
  }
  if (reps < 200) {
    throw ParameterError("rate experiment needs at least 200 replications");
  }
  if (!std::isfinite(x0)) {
    throw ParameterError("evaluation point must be finite");
  }

  const double truth = std::exp(-0.5 * x0 * x0) / std::sqrt(2.0 * std::numbers::pi);
  const double exponent = kind == EstimatorKind::bias_reduced ? -1.0 / 9.0 : -1.0 / 5.0;

  RateResult result{kind, {}, 0.0};
  for (std::size_t n : n_list) {
    const double h = std::pow(static_cast<double>(n), exponent);
    std::vector<double> sq_err(reps);
    parallel_for(reps, resolve_threads(threads), [&](std::size_t r) {
      rng::Stream stream(rng::mix64(seed) ^ n, r, rng::Purpose::rate);
      std::vector<double> xs(n);
      for (auto& x : xs) {
        x = stream.normal();
      }
      const double e = estimate_at(Sample(std::move(xs)), h, x0, kind) - truth;
      sq_err[r] = e * e;
    });
    result.points.push_back({n, h, moments(sq_err).mean});
  }

  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : result.points) {
    mx += std::log(static_cast<double>(p.n));
    my += std::log(p.mse);
  }
  const double k = static_cast<double>(result.points.size());
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& p : result.points) {
    const double dx = std::log(static_cast<double>(p.n)) - mx;
    sxy += dx * (std::log(p.mse) - my);
    sxx += dx * dx;
  }
  result.slope = sxy / sxx;
  return result;
}

std::vector<HistogramRow>
histogram_overlay(const Sample& sample)
{
  const MleFit poisson = fit_mle(Family::poisson, sample);
  const MleFit geometric = fit_mle(Family::geometric, sample, {.strict_support = false});
  const auto top = static_cast<std::int64_t>(sample.max());
  std::vector<HistogramRow> rows;
  rows.reserve(static_cast<std::size_t>(top) + 1);
  for (std::int64_t k = 0; k <= top; ++k) {
    rows.push_back({k, 0, 0.0,
                    poisson.degenerate ? (k == 0 ? 1.0 : 0.0) : model_pmf(poisson.model(), k),
                    geometric.degenerate ? (k == 1 ? 1.0 : 0.0)
                                         : model_pmf(geometric.model(), k)});
  }
  for (const auto& a : sample.atoms()) {
    rows[static_cast<std::size_t>(a.value)].count += static_cast<std::size_t>(a.count);
  }
  const double n = static_cast<double>(sample.size());
  for (auto& row : rows) {
    row.frequency = static_cast<double>(row.count) / n;
  }
  return rows;
}

} // namespace kldsel
