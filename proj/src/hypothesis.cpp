#include "kldsel/hypothesis.hpp"

#include "kldsel/divergence.hpp"
#include "kldsel/error.hpp"
#include "kldsel/parallel.hpp"
#include "kldsel/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace kldsel {

const char*
to_string(Decision decision) noexcept
{
  switch (decision) {
    case Decision::model_1:
      return "model_1";
    case Decision::model_2:
      return "model_2";
    case Decision::indecisive:
      return "indecisive";
    case Decision::reject:
      return "reject";
    case Decision::no_reject:
      return "no_reject";
    case Decision::withheld:
      return "withheld";
  }
  return "unknown";
}

GradientPair
divergence_gradients(const BinnedDistribution& p, const BinnedDistribution& q)
{
  if (!(p.cells == q.cells) || p.masses.size() != q.masses.size()) {
    throw ParameterError("divergence_gradients: distributions live on different partitions");
  }
  const BinnedDistribution qf = floor_and_renormalize(q, model_mass_floor);
  GradientPair g;
  g.u.resize(p.masses.size());
  g.s.resize(p.masses.size());
  for (std::size_t i = 0; i < p.masses.size(); ++i) {
    const double pi = p.masses[i];
    g.u[i] = std::log(std::max(pi, model_mass_floor) / qf.masses[i]) + 1.0;
    g.s[i] = -pi / qf.masses[i];
  }
  return g;
}

double
critical_value(double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("significance level must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
}

Decision
decide(double statistic, double alpha)
{
  const double z = critical_value(alpha);
  if (std::abs(statistic) <= z) {
    return Decision::indecisive;
  }
  return statistic < 0.0 ? Decision::model_1 : Decision::model_2;
}

namespace {

double
two_sided_p(double statistic)
{
  return std::erfc(std::abs(statistic) / std::numbers::sqrt2);
}

double
sample_sd(const std::vector<double>& xs)
{
  if (xs.size() < 2) {
    return 0.0;
  }
  double mean = 0.0;
  for (double x : xs) {
    mean += x;
  }
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void
check_families(std::span<const Family> families)
{
  if (families.empty()) {
    throw ParameterError("at least one candidate family is required");
  }
}

} // namespace

ScaleEstimate
bootstrap_scale(const Sample& sample,
                double h,
                std::span<const Family> families,
                const CellPartition& cells,
                const BootstrapOptions& options)
{
  check_families(families);
  if (options.resamples < 100) {
    throw ParameterError("bootstrap needs at least 100 resamples");
  }
  if (sample.size() < 2) {
    throw ParameterError("bootstrap needs at least two observations");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ParameterError("bandwidth must be positive and finite");
  }

  const auto atoms = sample.atoms();
  const std::size_t n = sample.size();
  const double n_real = static_cast<double>(n);
  const CellKernelMasses table(atoms, h, cells, EstimatorKind::bias_reduced,
                               sample.max() + 8.0 * h);

  // Observation position -> atom index, so a resample is a count vector.
  std::vector<std::size_t> atom_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    atom_of[i] = sample.atoms_within(sample[i], sample[i]).first;
  }

  const std::size_t k = families.size();
  // Per resample: one divergence per family, or nullopt when a fit degenerates.
  std::vector<std::optional<std::vector<double>>> draws(options.resamples);

  parallel_for(options.resamples, options.threads, [&](std::size_t b) {
    rng::Stream stream(options.seed, b, rng::Purpose::bootstrap);
    std::vector<double> counts(atoms.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      counts[atom_of[stream.below(n)]] += 1.0;
    }
    std::vector<Atom> resampled;
    std::vector<double> weights(atoms.size());
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      weights[a] = counts[a] / n_real;
      if (counts[a] > 0.0) {
        resampled.push_back({atoms[a].value, counts[a]});
      }
    }
    const Sample boot = sample_from_counts(resampled);
    const BinnedDistribution p =
      floor_and_renormalize({cells, table.masses(weights)}, model_mass_floor);

    std::vector<double> d(k);
    for (std::size_t j = 0; j < k; ++j) {
      const MleFit fit = fit_mle(families[j], boot, {.strict_support = false});
      if (fit.degenerate) {
        return;
      }
      d[j] = kld_discrete(p, model_cell_probs(fit.model(), cells));
    }
    draws[b] = std::move(d);
  });

  ScaleEstimate out;
  std::vector<std::vector<double>> per_family(k);
  std::vector<double> difference;
  for (const auto& d : draws) {
    if (!d) {
      ++out.degenerate_resamples;
      continue;
    }
    ++out.resamples_used;
    for (std::size_t j = 0; j < k; ++j) {
      per_family[j].push_back((*d)[j]);
    }
    if (k >= 2) {
      difference.push_back((*d)[0] - (*d)[1]);
    }
  }
  if (out.resamples_used == 0) {
    throw NumericError("every bootstrap resample produced a degenerate fit");
  }

  const double root_n = std::sqrt(n_real);
  for (std::size_t j = 0; j < k; ++j) {
    out.lambda_phi_hat.push_back(root_n * sample_sd(per_family[j]));
  }
  if (k >= 2) {
    out.xi_hat = root_n * sample_sd(difference);
    out.degenerate = out.xi_hat < degenerate_scale;
  } else {
    out.degenerate = out.lambda_phi_hat[0] < degenerate_scale;
  }
  return out;
}

ScaleEstimate
plugin_scale(const Sample& sample,
             double h,
             std::span<const Family> families,
             const CellPartition& cells)
{
  check_families(families);
  const BinnedDistribution empirical = empirical_cell_freqs(sample, cells);
  const BinnedDistribution p = bkde_cell_probs(sample, h, cells);
  const std::size_t m = cells.size();

  // v^T (diag(F) - F F^T) v
  auto multinomial_form = [m](const std::vector<double>& f, const std::vector<double>& v) {
    double quad = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      quad += f[i] * v[i] * v[i];
      lin += f[i] * v[i];
    }
    return quad - lin * lin;
  };

  std::vector<GradientPair> grads;
  std::vector<std::vector<double>> model_masses;
  ScaleEstimate out;
  for (Family family : families) {
    const MleFit fit = fit_mle(family, sample, {.strict_support = false});
    const BinnedDistribution q =
      floor_and_renormalize(model_cell_probs(fit.model(), cells), model_mass_floor);
    grads.push_back(divergence_gradients(p, q));
    model_masses.push_back(q.masses);
    const double var = multinomial_form(empirical.masses, grads.back().u) +
                       multinomial_form(q.masses, grads.back().s);
    out.lambda_phi_hat.push_back(std::sqrt(std::max(var, 0.0)));
  }
  out.resamples_used = 0;
  if (families.size() >= 2) {
    std::vector<double> du(m);
    for (std::size_t i = 0; i < m; ++i) {
      du[i] = grads[0].u[i] - grads[1].u[i];
    }
    const double var = multinomial_form(empirical.masses, du) +
                       multinomial_form(model_masses[0], grads[0].s) +
                       multinomial_form(model_masses[1], grads[1].s);
    out.xi_hat = std::sqrt(std::max(var, 0.0));
    out.degenerate = out.xi_hat < degenerate_scale;
  } else {
    out.degenerate = out.lambda_phi_hat[0] < degenerate_scale;
  }
  return out;
}

namespace {

double
divergence_difference(const Sample& sample,
                      double h,
                      const CellPartition& cells,
                      const ParametricModel& model_1,
                      const ParametricModel& model_2)
{
  const BinnedDistribution p = bkde_cell_probs(sample, h, cells);
  return kld_discrete(p, model_cell_probs(model_1, cells)) -
         kld_discrete(p, model_cell_probs(model_2, cells));
}

} // namespace

double
kl_n_statistic(const Sample& sample,
               double h,
               const CellPartition& cells,
               const ParametricModel& model_1,
               const ParametricModel& model_2,
               double xi_hat)
{
  if (!(xi_hat > 0.0) || !std::isfinite(xi_hat)) {
    throw ParameterError("kl_n_statistic: xi_hat must be positive");
  }
  const double root_n = std::sqrt(static_cast<double>(sample.size()));
  return root_n / xi_hat * divergence_difference(sample, h, cells, model_1, model_2);
}

TestResult
kl_n_test(const Sample& sample,
          double h,
          const CellPartition& cells,
          const ParametricModel& model_1,
          const ParametricModel& model_2,
          double xi_hat,
          double alpha)
{
  critical_value(alpha);
  if (!(xi_hat >= degenerate_scale) || !std::isfinite(xi_hat)) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, std::max(xi_hat, 0.0), 1.0, alpha, Decision::withheld, true};
  }
  const double stat = kl_n_statistic(sample, h, cells, model_1, model_2, xi_hat);
  return {stat, xi_hat, two_sided_p(stat), alpha, decide(stat, alpha), false};
}

TestResult
gof_statistic(const Sample& sample,
              double h,
              const CellPartition& cells,
              const ParametricModel& model,
              double lambda_phi_hat,
              double alpha)
{
  critical_value(alpha);
  if (!(lambda_phi_hat >= degenerate_scale) || !std::isfinite(lambda_phi_hat)) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, std::max(lambda_phi_hat, 0.0), 1.0, alpha, Decision::withheld, true};
  }
  const BinnedDistribution p = bkde_cell_probs(sample, h, cells);
  const double d = kld_discrete(p, model_cell_probs(model, cells));
  const double stat = std::sqrt(static_cast<double>(sample.size())) * d / lambda_phi_hat;
  const double pv = two_sided_p(stat);
  return {stat, lambda_phi_hat, pv, alpha, pv < alpha ? Decision::reject : Decision::no_reject,
          false};
}

} // namespace kldsel
