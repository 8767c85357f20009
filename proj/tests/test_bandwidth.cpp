#include "kldsel/bandwidth.hpp"
#include "kldsel/density.hpp"
#include "kldsel/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kldsel;
using doctest::Approx;

namespace {

// Closed form of int (sum_i phi((x - X_i)/h) / (n h))^2 dx for the Gaussian
// effective kernel: pairwise sums of (phi * phi)(d / h) / h, where
// phi * phi = g - g'' + g''''/4 and g is the N(0, 2) density.
double
phi_conv(double d)
{
  const double g = std::exp(-d * d / 4.0) / (2.0 * std::sqrt(std::numbers::pi));
  const double g2 = g * (d * d / 4.0 - 0.5);
  const double g4 = g * (d * d * d * d / 16.0 - 1.5 * d * d / 2.0 + 0.75);
  return g - g2 + 0.25 * g4;
}

double
l2_closed_form(const std::vector<double>& xs, double h)
{
  double s = 0.0;
  for (double a : xs) {
    for (double b : xs) {
      s += phi_conv((a - b) / h);
    }
  }
  const double n = static_cast<double>(xs.size());
  return s / (n * n * h);
}

} // namespace

TEST_CASE("squared norm of a single-point estimate")
{
  const Sample s({0.0});
  CHECK(l2_norm_squared(s, 1.0, EstimatorKind::bias_reduced) == Approx(0.4760349).epsilon(1e-6));
  CHECK(l2_norm_squared(s, 0.7, EstimatorKind::bias_reduced) == Approx(0.6800499).epsilon(1e-6));
  CHECK(l2_norm_squared(s, 1.0, EstimatorKind::classical) == Approx(0.2820948).epsilon(1e-6));
  CHECK(phi_conv(0.0) == Approx(6.75 / (8.0 * std::sqrt(std::numbers::pi))).epsilon(1e-14));
  const double base = l2_norm_squared(s, 1.0, EstimatorKind::bias_reduced);
  for (double h : {0.25, 0.5, 1.0, 2.0}) {
    CHECK(l2_norm_squared(s, h, EstimatorKind::bias_reduced) == Approx(base / h).epsilon(1e-6));
  }
}

TEST_CASE("squared norm matches the convolution closed form")
{
  std::mt19937_64 gen(8);
  const auto xs = oracle::normal_draws(gen, 25);
  const Sample s(xs);
  for (double h : {0.15, 0.4, 1.1}) {
    CHECK(l2_norm_squared(s, h, EstimatorKind::bias_reduced) ==
          Approx(l2_closed_form(xs, h)).epsilon(2e-6));
  }
}

TEST_CASE("cv objective")
{
  CHECK(cv_objective(Sample({0.0, 0.0}), 1.0) == Approx(-0.5157898).epsilon(1e-6));
  CHECK_THROWS_AS(cv_objective(Sample({0.0}), 1.0), ParameterError);
  CHECK_THROWS_AS(cv_objective(Sample({0.0, 1.0}), 0.0), ParameterError);
  const Sample a({0.3, -1.2, 2.0, 0.9, 0.1});
  const Sample b({2.0, 0.1, 0.3, 0.9, -1.2});
  CHECK(cv_objective(a, 0.6) == cv_objective(b, 0.6));
  CHECK(cv_objective(a, 0.6) != cv_objective(a, 0.7));
  CHECK(cv_objective(a, 0.6) == cv_objective(a, 0.6));
}

TEST_CASE("mcv objective")
{
  // Two coincident points: f_b = phi / h, so the norm term is int phi^2 and
  // each leave-one-out value is phi(0).
  CHECK(mcv_objective(Sample({0.0, 0.0}), 1.0) == Approx(0.4760349 - 2.0 * oracle::phi(0.0)).epsilon(1e-6));
  CHECK(mcv_objective(Sample({0.0, 0.0}), 1.0) == Approx(-0.7207919).epsilon(1e-6));
  CHECK_THROWS_AS(mcv_objective(Sample({0.0}), 1.0), ParameterError);
  const Sample a({0.3, -1.2, 2.0, 0.9, 0.1});
  const Sample b({0.9, 0.1, -1.2, 2.0, 0.3});
  CHECK(mcv_objective(a, 0.6) == Approx(mcv_objective(b, 0.6)).epsilon(1e-14));

  // Independent evaluation: closed-form norm minus the leave-one-out sum.
  std::mt19937_64 gen(4);
  const auto xs = oracle::normal_draws(gen, 30);
  const Sample s(xs);
  const double h = 0.45;
  double loo = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double fi = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j != i) {
        fi += oracle::phi((xs[i] - xs[j]) / h);
      }
    }
    loo += fi / ((xs.size() - 1.0) * h);
  }
  const double expected = l2_closed_form(xs, h) - 2.0 * loo / xs.size();
  CHECK(mcv_objective(s, h) == Approx(expected).epsilon(1e-5));
}

TEST_CASE("mcv is finite and continuous on a normal sample")
{
  std::mt19937_64 gen(100);
  const Sample s(oracle::normal_draws(gen, 100));
  for (int i = 0; i <= 39; ++i) {
    const double h = 0.05 * std::pow(40.0, i / 39.0);
    const double v = mcv_objective(s, h);
    CHECK(std::isfinite(v));
    const double w = mcv_objective(s, h * (1.0 + 1e-9));
    CHECK(std::abs(w - v) <= 1e-6 * std::abs(v));
  }
}

TEST_CASE("reference bandwidth")
{
  std::mt19937_64 gen(2);
  auto standardized = [&](std::size_t n, double sd) {
    auto xs = oracle::normal_draws(gen, n);
    double m = 0.0;
    for (double x : xs) {
      m += x;
    }
    m /= n;
    double ss = 0.0;
    for (double x : xs) {
      ss += (x - m) * (x - m);
    }
    const double k = sd / std::sqrt(ss / (n - 1.0));
    for (auto& x : xs) {
      x = (x - m) * k;
    }
    return Sample(xs);
  };
  CHECK(reference_bandwidth(standardized(100, 1.0)) == Approx(0.4219).epsilon(1e-4));
  CHECK(reference_bandwidth(standardized(100, 2.0)) == Approx(2.0 * 1.06 * std::pow(100.0, -0.2)));
  CHECK(reference_bandwidth(standardized(3200, 1.0)) == Approx(0.2109).epsilon(1e-3));
  CHECK_THROWS_AS(reference_bandwidth(Sample({1.0, 1.0, 1.0})), ParameterError);
  CHECK_THROWS_AS(reference_bandwidth(Sample({1.0})), ParameterError);
  const Sample unit = standardized(100, 1.0);
  const auto r = default_search_range(unit);
  CHECK(r.lo == Approx(0.1 * 1.06 * std::pow(100.0, -0.2)).epsilon(1e-12));
  CHECK(r.hi == Approx(3.0 * 1.06 * std::pow(100.0, -0.2)).epsilon(1e-12));
}

TEST_CASE("minimizer on synthetic objectives")
{
  const auto q = minimize_bandwidth([](double h) { return (h - 0.5) * (h - 0.5); }, 0.05, 2.0);
  CHECK(std::abs(q.h_star - 0.5) < 1e-3);
  CHECK(q.search_lo == 0.05);
  CHECK(q.search_hi == 2.0);
  CHECK(q.evaluations > coarse_grid_points);

  const auto mono = minimize_bandwidth([](double h) { return h; }, 0.1, 3.0);
  CHECK(mono.h_star == Approx(0.1).epsilon(1e-4));

  CHECK_THROWS_AS(minimize_bandwidth([](double) { return std::nan(""); }, 0.1, 1.0), NumericError);
  CHECK_THROWS_AS(minimize_bandwidth([](double h) { return h; }, 1.0, 0.5), ParameterError);
  CHECK_THROWS_AS(minimize_bandwidth([](double h) { return h; }, 0.0, 0.5), ParameterError);

  // Non-finite in part of the range only.
  const auto part = minimize_bandwidth(
    [](double h) { return h < 0.3 ? std::nan("") : (h - 0.8) * (h - 0.8); }, 0.1, 2.0);
  CHECK(std::abs(part.h_star - 0.8) < 1e-3);
}

TEST_CASE("interior rule skips a minimum at the lower edge")
{
  // Diverges at the lower edge, local minimum at 1.
  auto f = [](double h) { return std::pow(h - 1.0, 2) - 0.02 / h; };
  const auto global = minimize_bandwidth(f, 0.01, 3.0, GridRule::global_minimum);
  const auto interior = minimize_bandwidth(f, 0.01, 3.0, GridRule::interior_minimum);
  CHECK(global.h_star == Approx(0.01).epsilon(1e-3));
  CHECK(interior.h_star == Approx(1.0).epsilon(0.05));
  // Without an interior minimum both rules agree.
  auto g = [](double h) { return h; };
  CHECK(minimize_bandwidth(g, 0.1, 1.0, GridRule::interior_minimum).h_star ==
        minimize_bandwidth(g, 0.1, 1.0, GridRule::global_minimum).h_star);
}

TEST_CASE("selection dominates the coarse grid")
{
  std::mt19937_64 gen(200);
  const Sample s(oracle::normal_draws(gen, 200));
  const auto sel = select_bandwidth(s, Objective::mcv, 0.05, 2.0);
  CHECK(sel.objective == Objective::mcv);
  CHECK(sel.h_star >= 0.05);
  CHECK(sel.h_star <= 2.0);
  CHECK(sel.objective_value == Approx(mcv_objective(s, sel.h_star)).epsilon(1e-10));
  for (std::size_t i = 0; i < coarse_grid_points; ++i) {
    const double h = 0.05 * std::pow(2.0 / 0.05, static_cast<double>(i) / (coarse_grid_points - 1));
    CHECK(sel.objective_value <= mcv_objective(s, h) + 1e-12);
  }
  const auto def = select_bandwidth(s, Objective::cv);
  CHECK(def.h_star >= def.search_lo);
  CHECK(def.h_star <= def.search_hi);
  CHECK(def.search_lo < def.search_hi);
}

TEST_CASE("selection on tied count data lands inside the range")
{
  std::mt19937_64 gen(9);
  const Sample s(oracle::poisson_draws(gen, 150, 9.0));
  const auto sel = select_bandwidth(s, Objective::mcv);
  CHECK(sel.h_star > sel.search_lo * 1.01);
  CHECK(sel.h_star < sel.search_hi);
}

TEST_CASE("fixed bandwidth record")
{
  const auto f = fixed_bandwidth(0.3);
  CHECK(f.h_star == 0.3);
  CHECK(f.objective == Objective::fixed);
  CHECK(f.search_lo == 0.3);
  CHECK(f.search_hi == 0.3);
  CHECK_THROWS_AS(fixed_bandwidth(0.0), ParameterError);
  CHECK(std::string(to_string(Objective::mcv)) == "mcv");
}
