#include "kldsel/divergence.hpp"

#include "kldsel/density.hpp"
#include "kldsel/error.hpp"
#include "kldsel/quadrature.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace kldsel {

double
threshold_epsilon(std::size_t n)
{
  if (n == 0) {
    throw ParameterError("threshold_epsilon: n must be at least 1");
  }
  return std::pow(static_cast<double>(n), -0.25);
}

namespace {

struct PanelSums
{
  double value;
  double mass;
};

class TruncatedIntegrand
{
public:
  TruncatedIntegrand(const Sample& sample,
                     double h,
                     const std::function<double(double)>& model_pdf,
                     double epsilon)
    : sample_(sample)
    , h_(h)
    , model_pdf_(model_pdf)
    , epsilon_(epsilon)
  {}

  double density(double x) const { return bkde_at(sample_, h_, x); }

  // f ln(f / m) for an active point.
  double integrand(double x, double f) const
  {
    if (!(f > 0.0)) {
      return 0.0;
    }
    const double m = model_pdf_(x);
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw DomainError("model density must be positive and finite on the active set; got " +
                        std::to_string(m) + " at x = " + std::to_string(x));
    }
    return f * std::log(f / m);
  }

  bool active(double f) const { return f >= epsilon_; }

  // Trapezoid over [lo, hi] given density values at the nodes.
  PanelSums integrate(double lo, double hi, const std::vector<double>& f) const
  {
    const std::size_t panels = f.size() - 1;
    const double step = (hi - lo) / static_cast<double>(panels);
    std::vector<double> g(f.size(), 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (active(f[i])) {
        g[i] = integrand(node(lo, step, i), f[i]);
      }
    }
    std::vector<double> values(panels, 0.0);
    std::vector<double> masses(panels, 0.0);
    for (std::size_t i = 0; i < panels; ++i) {
      const bool left = active(f[i]);
      const bool right = active(f[i + 1]);
      if (left && right) {
        values[i] = 0.5 * step * (g[i] + g[i + 1]);
        masses[i] = 0.5 * step * (f[i] + f[i + 1]);
      } else if (left != right) {
        const double t = (epsilon_ - f[i]) / (f[i + 1] - f[i]);
        const double xc = node(lo, step, i) + t * step;
        const double fc = density(xc);
        const double gc = integrand(xc, fc);
        if (left) {
          values[i] = 0.5 * t * step * (g[i] + gc);
          masses[i] = 0.5 * t * step * (f[i] + fc);
        } else {
          values[i] = 0.5 * (1.0 - t) * step * (gc + g[i + 1]);
          masses[i] = 0.5 * (1.0 - t) * step * (fc + f[i + 1]);
        }
      }
    }
    return {quadrature::pairwise_sum(values), quadrature::pairwise_sum(masses)};
  }

  static double node(double lo, double step, std::size_t i)
  {
    return lo + static_cast<double>(i) * step;
  }

private:
  const Sample& sample_;
  double h_;
  const std::function<double(double)>& model_pdf_;
  double epsilon_;
};

} // namespace

DivergenceEstimate
kld_continuous(const Sample& sample,
               double h,
               const std::function<double(double)>& model_pdf,
               double epsilon)
{
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ParameterError("bandwidth must be positive and finite");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("truncation threshold must be positive and finite");
  }
  constexpr double rel_tol = 1e-5;
  constexpr double abs_tol = 1e-12;
  constexpr int max_halvings = 20;

  const double lo = sample.min() - 8.0 * h;
  const double hi = sample.max() + 8.0 * h;
  TruncatedIntegrand body(sample, h, model_pdf, epsilon);

  std::size_t panels = static_cast<std::size_t>(std::ceil(2.0 * (hi - lo) / h));
  std::vector<double> f(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i) {
    f[i] = body.density(TruncatedIntegrand::node(lo, (hi - lo) / static_cast<double>(panels), i));
  }
  PanelSums previous = body.integrate(lo, hi, f);

  for (int k = 1; k <= max_halvings; ++k) {
    const double step = (hi - lo) / static_cast<double>(2 * panels);
    std::vector<double> refined(2 * panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) {
      refined[2 * i] = f[i];
    }
    for (std::size_t i = 0; i < panels; ++i) {
      refined[2 * i + 1] = body.density(TruncatedIntegrand::node(lo, step, 2 * i + 1));
    }
    f = std::move(refined);
    panels *= 2;
    const PanelSums current = body.integrate(lo, hi, f);
    if (std::abs(current.value - previous.value) <= rel_tol * std::abs(current.value) + abs_tol) {
      return {current.value, epsilon, current.mass, lo, hi, f.size()};
    }
    previous = current;
  }
  throw NumericError("kld_continuous: quadrature did not converge");
}

double
kld_discrete(const BinnedDistribution& p, const BinnedDistribution& q)
{
  if (!(p.cells == q.cells)) {
    throw ParameterError("kld_discrete: distributions live on different partitions");
  }
  validate(p);
  validate(q);
  const BinnedDistribution qf = floor_and_renormalize(q, model_mass_floor);
  std::vector<double> terms(p.masses.size(), 0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (p.masses[i] > 0.0) {
      terms[i] = p.masses[i] * std::log(p.masses[i] / qf.masses[i]);
    }
  }
  return quadrature::pairwise_sum(terms);
}

double
mkld_ratio(double d_bias_reduced, double d_classical)
{
  if (!(d_classical > 0.0)) {
    throw ParameterError("mkld_ratio: classical divergence must be positive");
  }
  return d_bias_reduced / d_classical;
}

} // namespace kldsel
