#include "kldsel/models.hpp"

#include "kldsel/divergence.hpp"
#include "kldsel/error.hpp"
#include "kldsel/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kldsel {

const char*
to_string(Family family) noexcept
{
  return family == Family::poisson ? "poisson" : "geometric";
}

ParametricModel
make_model(Family family, double parameter)
{
  if (family == Family::poisson && !(parameter > 0.0 && std::isfinite(parameter))) {
    throw ParameterError("poisson rate must be positive, got " + std::to_string(parameter));
  }
  if (family == Family::geometric && !(parameter > 0.0 && parameter < 1.0)) {
    throw ParameterError("geometric success probability must lie in (0, 1), got " +
                         std::to_string(parameter));
  }
  return {family, parameter};
}

double
model_pmf(const ParametricModel& model, std::int64_t x)
{
  make_model(model.family, model.parameter);
  if (x < 0) {
    throw ParameterError("model_pmf: count must be nonnegative");
  }
  const double k = static_cast<double>(x);
  if (model.family == Family::poisson) {
    const double lambda = model.parameter;
    return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
  }
  if (x == 0) {
    return 0.0;
  }
  const double theta = model.parameter;
  return std::exp(std::log(theta) + (k - 1.0) * std::log1p(-theta));
}

ParametricModel
MleFit::model() const
{
  if (degenerate) {
    throw NumericError(std::string("degenerate ") + to_string(family) +
                       " fit on the parameter boundary");
  }
  return make_model(family, estimate);
}

MleFit
fit_mle(Family family, const Sample& sample, MleOptions options)
{
  double total = 0.0;
  double below_support = 0.0;
  for (const auto& a : sample.atoms()) {
    if (a.value < 0.0 || a.value != std::floor(a.value)) {
      throw DomainError("count models need nonnegative integer data, got " +
                        std::to_string(a.value));
    }
    total += a.count * a.value;
    if (a.value < 1.0) {
      below_support += a.count;
    }
  }
  const double n = static_cast<double>(sample.size());

  MleFit fit{family, 0.0};
  if (family == Family::poisson) {
    fit.estimate = total / n;
    fit.degenerate = !(fit.estimate > 0.0);
    return fit;
  }

  if (below_support > 0.0) {
    if (options.strict_support) {
      throw DomainError("geometric fit needs all observations >= 1");
    }
    fit.support_violation = true;
  }
  // n / (n + sum(x_i - 1)) = n / sum(x_i)
  fit.estimate = total > 0.0 ? n / total : std::numeric_limits<double>::infinity();
  fit.degenerate = !(fit.estimate < 1.0);
  return fit;
}

BinnedDistribution
model_cell_probs(const ParametricModel& model, const CellPartition& cells)
{
  make_model(model.family, model.parameter);
  const std::size_t m = cells.size();
  std::vector<double> masses(m, 0.0);
  double covered = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const auto first = static_cast<std::int64_t>(std::ceil(cells.lower(i)));
    const auto last = static_cast<std::int64_t>(std::ceil(cells.upper(i)));
    double s = 0.0;
    for (std::int64_t k = first; k < last; ++k) {
      s += model_pmf(model, k);
    }
    masses[i] = s;
    covered += s;
  }
  masses[m - 1] = std::max(0.0, 1.0 - covered);
  return {cells, std::move(masses)};
}

CellKernelMasses::CellKernelMasses(std::span<const Atom> atoms,
                                   double h,
                                   const CellPartition& cells,
                                   EstimatorKind kind,
                                   double last_cell_upper)
  : atoms_(atoms.size())
  , cells_(cells)
  , table_(atoms.size() * cells.size(), 0.0)
{
  const double offset = cells.offset();
  const std::size_t m = cells.size();
  for (std::size_t a = 0; a < atoms_; ++a) {
    // A one-atom sample; integrate_estimate applies the same antiderivatives
    // as for the full sample.
    const Sample point({atoms[a].value});
    for (std::size_t i = 0; i < m; ++i) {
      const double lo = cells.lower(i) - offset;
      const double hi = i + 1 == m ? std::max(lo, last_cell_upper) : cells.upper(i) - offset;
      table_[a * m + i] = integrate_estimate(point, h, lo, hi, kind);
    }
  }
}

std::vector<double>
CellKernelMasses::masses(std::span<const double> weights) const
{
  if (weights.size() != atoms_) {
    throw ParameterError("CellKernelMasses: weight vector has the wrong length");
  }
  const std::size_t m = cells_.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t a = 0; a < atoms_; ++a) {
    if (weights[a] == 0.0) {
      continue;
    }
    for (std::size_t i = 0; i < m; ++i) {
      out[i] += weights[a] * table_[a * m + i];
    }
  }
  return out;
}

BinnedDistribution
kde_cell_probs(const Sample& sample,
               double h,
               const CellPartition& cells,
               EstimatorKind kind)
{
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ParameterError("bandwidth must be positive and finite");
  }
  const CellKernelMasses table(sample.atoms(), h, cells, kind, sample.max() + 8.0 * h);
  std::vector<double> weights;
  weights.reserve(sample.atoms().size());
  const double n = static_cast<double>(sample.size());
  for (const auto& a : sample.atoms()) {
    weights.push_back(a.count / n);
  }
  return floor_and_renormalize({cells, table.masses(weights)}, model_mass_floor);
}

BinnedDistribution
bkde_cell_probs(const Sample& sample, double h, const CellPartition& cells)
{
  return kde_cell_probs(sample, h, cells, EstimatorKind::bias_reduced);
}

BinnedDistribution
empirical_cell_freqs(const Sample& sample, const CellPartition& cells)
{
  std::vector<double> masses(cells.size(), 0.0);
  for (const auto& a : sample.atoms()) {
    masses[cells.cell_index(a.value)] += a.count;
  }
  const double n = static_cast<double>(sample.size());
  for (double& m : masses) {
    m /= n;
  }
  return {cells, std::move(masses)};
}

} // namespace kldsel
