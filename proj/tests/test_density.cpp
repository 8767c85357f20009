#include "kldsel/density.hpp"
#include "kldsel/error.hpp"
#include "kldsel/sample.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace kldsel;
using doctest::Approx;

TEST_CASE("sample construction")
{
  CHECK_THROWS_AS(Sample({}), ParameterError);
  CHECK_THROWS_AS(Sample({1.0, std::numeric_limits<double>::quiet_NaN()}), ParameterError);
  CHECK_THROWS_AS(Sample({std::numeric_limits<double>::infinity()}), ParameterError);

  const Sample s({3.0, 1.0, 3.0, 2.0});
  CHECK(s.size() == 4);
  CHECK(s[0] == 3.0);
  CHECK(s.min() == 1.0);
  CHECK(s.max() == 3.0);
  CHECK(s.has_ties());
  CHECK(s.mean() == Approx(2.25));
  CHECK(s.sd() == Approx(std::sqrt(2.75 / 3.0)));
  REQUIRE(s.atoms().size() == 3);
  CHECK(s.atoms()[2].value == 3.0);
  CHECK(s.atoms()[2].count == 2.0);
  CHECK_FALSE(Sample({1.0, 2.0}).has_ties());

  const Sample rebuilt = sample_from_counts(s.atoms());
  CHECK(rebuilt.size() == 4);
  CHECK(rebuilt.mean() == Approx(2.25));
}

TEST_CASE("classical estimate at reference points")
{
  CHECK(kde_at(Sample({0.0}), 1.0, 0.0) == Approx(0.3989423).epsilon(1e-7));
  CHECK(kde_at(Sample({-1.0, 1.0}), 1.0, 0.0) == Approx(0.2419707).epsilon(1e-7));
  CHECK(kde_at(Sample({0.0}), 2.0, 0.0) == Approx(0.1994711).epsilon(1e-7));
  CHECK_THROWS_AS(kde_at(Sample({0.0}), 0.0, 0.0), ParameterError);
  CHECK_THROWS_AS(kde_at(Sample({0.0}), -1.0, 0.0), ParameterError);
}

TEST_CASE("bias-reduced estimate at reference points")
{
  const Sample s({0.0});
  CHECK(bkde_at(s, 1.0, 0.0) == Approx(0.5984134).epsilon(1e-7));
  CHECK(bkde_at(s, 1.0, 2.0) == Approx(-0.0269955).epsilon(1e-6));
  CHECK(bkde_at(s, 1.0, 1.0) == Approx(0.2419707).epsilon(1e-7));
  CHECK_THROWS_AS(bkde_at(s, 0.0, 0.0), ParameterError);
}

TEST_CASE("bias-reduced estimate equals the closed-form sum")
{
  std::mt19937_64 gen(11);
  const auto xs = oracle::normal_draws(gen, 60);
  const Sample s(xs);
  for (double h : {0.2, 0.5, 1.3}) {
    for (double x : {-2.0, -0.3, 0.0, 0.8, 3.1}) {
      double sum = 0.0;
      for (double xi : xs) {
        const double u = (x - xi) / h;
        sum += (3.0 - u * u) * std::exp(-0.5 * u * u);
      }
      const double closed = sum / (2.0 * std::sqrt(2.0 * std::numbers::pi) * 60.0 * h);
      CHECK(bkde_at(s, h, x) == Approx(closed).epsilon(1e-12));
      CHECK(estimate_at(s, h, x, EstimatorKind::bias_reduced) == bkde_at(s, h, x));
      CHECK(estimate_at(s, h, x, EstimatorKind::classical) == kde_at(s, h, x));
    }
  }
}

TEST_CASE("leave-one-out estimates")
{
  CHECK(bkde_loo_at(Sample({0.0, 5.0}), 1.0, 0, 5.0) == Approx(0.5984134).epsilon(1e-6));
  CHECK(bkde_loo_at(Sample({0.0, 0.0}), 1.0, 1, 0.0) == Approx(0.5984134).epsilon(1e-6));
  CHECK(bkde_loo_at(Sample({0.0, 1.0, 2.0}), 1.0, 1, 0.0) == Approx(0.2857089).epsilon(1e-6));
  CHECK(bkde_loo_at(Sample({0.0, 1.0, 2.0}), 1.0, 1, 0.0) ==
        Approx((oracle::phi(0.0) + oracle::phi(-2.0)) / 2.0).epsilon(1e-14));
  CHECK(kde_loo_at(Sample({0.0, 1.0, 2.0}), 1.0, 0, 0.0) ==
        Approx((oracle::normal_pdf(1.0) + oracle::normal_pdf(2.0)) / 2.0).epsilon(1e-14));

  CHECK_THROWS_AS(bkde_loo_at(Sample({0.0}), 1.0, 0, 0.0), ParameterError);
  CHECK_THROWS_AS(bkde_loo_at(Sample({0.0, 1.0}), 1.0, 2, 0.0), ParameterError);
  CHECK_THROWS_AS(kde_loo_at(Sample({0.0, 1.0}), 1.0, 5, 0.0), ParameterError);
}

TEST_CASE("leave-one-out sum equals the sum of leave-one-out values")
{
  const Sample s({0.0, 1.0, 1.0, 2.5, 4.0, 4.0, 4.0});
  for (auto kind : {EstimatorKind::classical, EstimatorKind::bias_reduced}) {
    double direct = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      direct += kind == EstimatorKind::classical ? kde_loo_at(s, 0.7, i, s[i])
                                                 : bkde_loo_at(s, 0.7, i, s[i]);
    }
    CHECK(loo_sum(s, 0.7, kind) == Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("grid evaluation")
{
  const Sample s({0.0});
  const std::vector<double> g0{0.0};
  const auto e0 = evaluate_on_grid(s, 1.0, g0, EstimatorKind::bias_reduced);
  REQUIRE(e0.values.size() == 1);
  CHECK(e0.values[0] == Approx(0.5984134).epsilon(1e-7));
  CHECK(e0.bandwidth == 1.0);
  CHECK(e0.kind == EstimatorKind::bias_reduced);

  const std::vector<double> g3{-1.0, 0.0, 1.0};
  const auto e3 = evaluate_on_grid(s, 1.0, g3, EstimatorKind::classical);
  CHECK(e3.values[0] == e3.values[2]);
  CHECK(e3.values[1] > e3.values[0]);

  std::mt19937_64 gen(5);
  const Sample big(oracle::normal_draws(gen, 40));
  const auto grid = default_grid(big, 0.4, 77);
  CHECK(grid.size() == 77);
  CHECK(grid.front() == Approx(big.min() - 1.6));
  CHECK(grid.back() == Approx(big.max() + 1.6));
  CHECK(evaluate_on_grid(big, 0.4, grid, EstimatorKind::classical).values.size() == 77);
  CHECK(default_grid(big, 0.4).size() == 512);

  const std::vector<double> bad{0.0, 0.0};
  CHECK_THROWS_AS(evaluate_on_grid(s, 1.0, bad, EstimatorKind::classical), ParameterError);
  CHECK_THROWS_AS(evaluate_on_grid(s, 1.0, std::vector<double>{}, EstimatorKind::classical), ParameterError);
}

TEST_CASE("classical values are nonnegative, bias-reduced may be negative")
{
  const Sample s({0.0, 0.1, 5.0});
  const auto grid = default_grid(s, 0.5, 200);
  const auto c = evaluate_on_grid(s, 0.5, grid, EstimatorKind::classical);
  const auto b = evaluate_on_grid(s, 0.5, grid, EstimatorKind::bias_reduced);
  CHECK(*std::min_element(c.values.begin(), c.values.end()) >= 0.0);
  CHECK(*std::min_element(b.values.begin(), b.values.end()) < 0.0);
}

TEST_CASE("bias-reduced estimate integrates to one")
{
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 5; ++rep) {
    const Sample s(oracle::normal_draws(gen, 50));
    const double h = 0.3 + 0.2 * rep;
    const double a = s.min() - 10.0 * h;
    const double b = s.max() + 10.0 * h;
    const double step = h / 20.0;
    const auto m = static_cast<std::size_t>(std::ceil((b - a) / step));
    double sum = 0.5 * (bkde_at(s, h, a) + bkde_at(s, h, a + m * step));
    for (std::size_t i = 1; i < m; ++i) {
      sum += bkde_at(s, h, a + i * step);
    }
    CHECK(std::abs(sum * step - 1.0) < 1e-3);
    CHECK(integrate_estimate(s, h, a, b, EstimatorKind::bias_reduced) == Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("exact integral over an interval matches quadrature")
{
  const Sample s({0.0, 1.0, 1.0, 3.0});
  for (auto kind : {EstimatorKind::classical, EstimatorKind::bias_reduced}) {
    for (auto [lo, hi] : {std::pair{-1.0, 0.5}, std::pair{0.5, 2.5}, std::pair{2.0, 9.0}}) {
      const double q =
        oracle::simpson([&](double x) { return estimate_at(s, 0.6, x, kind); }, lo, hi, 4000);
      CHECK(integrate_estimate(s, 0.6, lo, hi, kind) == Approx(q).epsilon(1e-10));
    }
  }
}

TEST_CASE("equivariance and permutation invariance")
{
  std::mt19937_64 gen(3);
  auto xs = oracle::normal_draws(gen, 30);
  const Sample s(xs);
  const double c = 2.75;
  std::vector<double> shifted;
  std::vector<double> scaled;
  for (double x : xs) {
    shifted.push_back(x + c);
    scaled.push_back(x * c);
  }
  std::vector<double> permuted(xs.rbegin(), xs.rend());
  std::shuffle(permuted.begin(), permuted.end(), gen);
  const Sample ss(shifted);
  const Sample sc(scaled);
  const Sample sp(permuted);
  for (double x : {-1.5, 0.0, 0.7}) {
    CHECK(bkde_at(ss, 0.4, x + c) == Approx(bkde_at(s, 0.4, x)).epsilon(1e-12));
    CHECK(std::abs(bkde_at(sc, c * 0.4, c * x) - bkde_at(s, 0.4, x) / c) < 1e-12);
    CHECK(bkde_at(sp, 0.4, x) == Approx(bkde_at(s, 0.4, x)).epsilon(1e-14));
  }
}

TEST_CASE("sup-norm error shrinks with n")
{
  // Reduced form of the acceptance check: 20 pairs.
  std::vector<double> grid;
  for (int i = -30; i <= 30; ++i) {
    grid.push_back(i / 10.0);
  }
  auto sup_error = [&](const Sample& s) {
    const double h = std::pow(static_cast<double>(s.size()), -1.0 / 7.0);
    double worst = 0.0;
    for (double x : grid) {
      worst = std::max(worst, std::abs(bkde_at(s, h, x) - oracle::normal_pdf(x)));
    }
    return worst;
  };
  int better = 0;
  for (int t = 0; t < 20; ++t) {
    std::mt19937_64 gen(1000 + t);
    const Sample small(oracle::normal_draws(gen, 250));
    const Sample large(oracle::normal_draws(gen, 4000));
    better += sup_error(large) < sup_error(small);
  }
  CHECK(better >= 18);
}

TEST_CASE("bias is linear in h for a Lipschitz density")
{
  // Laplace density: Lipschitz with a kink at 0. A deterministic quantile
  // sample stands in for the expectation of the estimate.
  const std::size_t n = 20000;
  std::vector<double> xs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    xs[j] = p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
  }
  const Sample s(xs);
  auto laplace = [](double x) { return 0.5 * std::exp(-std::abs(x)); };
  auto sup_bias = [&](double h) {
    double worst = 0.0;
    for (int i = -30; i <= 30; ++i) {
      const double x = i / 10.0;
      worst = std::max(worst, std::abs(bkde_at(s, h, x) - laplace(x)));
    }
    return worst;
  };
  const double ratio = sup_bias(0.1) / sup_bias(0.2);
  CHECK(ratio >= 0.3);
  CHECK(ratio <= 0.7);
}
