#include "kldsel/error.hpp"
#include "kldsel/models.hpp"
#include "kldsel/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

using namespace kldsel;
using doctest::Approx;

namespace {

bool
same_bits(double a, double b)
{
  return std::memcmp(&a, &b, sizeof a) == 0;
}

bool
same_record(const ReplicationRecord& a, const ReplicationRecord& b)
{
  return a.rep_index == b.rep_index && same_bits(a.h_bias_reduced, b.h_bias_reduced) &&
         same_bits(a.h_classical, b.h_classical) && same_bits(a.lambda_hat, b.lambda_hat) &&
         same_bits(a.theta_hat, b.theta_hat) && a.support_violation == b.support_violation &&
         same_bits(a.d_poisson, b.d_poisson) && same_bits(a.d_geometric, b.d_geometric) &&
         same_bits(a.n_d_poisson, b.n_d_poisson) && same_bits(a.n_d_geometric, b.n_d_geometric) &&
         same_bits(a.d_classical_geometric, b.d_classical_geometric) &&
         same_bits(a.d_bias_reduced_geometric, b.d_bias_reduced_geometric) &&
         same_bits(a.mkld, b.mkld) && same_bits(a.mkld_shifted, b.mkld_shifted) &&
         same_bits(a.xi_hat, b.xi_hat) && same_bits(a.kl_n, b.kl_n) && a.decision == b.decision &&
         a.degenerate == b.degenerate;
}

ExperimentConfig
small_config(double pi, std::size_t n, std::size_t reps)
{
  ExperimentConfig c;
  c.pi = pi;
  c.n = n;
  c.reps = reps;
  c.bootstrap = 100;
  return c;
}

} // namespace

TEST_CASE("mixture draws")
{
  rng::Stream s1(1, 0, rng::Purpose::sampling);
  const auto pois = sample_mixture(1.0, 1000, s1);
  CHECK(pois.mean() >= 8.7);
  CHECK(pois.mean() <= 9.3);
  for (double v : pois.values()) {
    CHECK(v >= 0.0);
    CHECK(v == std::floor(v));
  }

  rng::Stream s2(1, 1, rng::Purpose::sampling);
  const auto geo = sample_mixture(0.0, 1000, s2);
  CHECK(geo.mean() >= 9.1);
  CHECK(geo.mean() <= 10.9);
  CHECK(geo.min() >= 1.0);

  // Zero is reachable only through the Poisson branch.
  bool saw_zero = false;
  for (std::uint64_t k = 0; k < 200 && !saw_zero; ++k) {
    rng::Stream s(k, 0, rng::Purpose::sampling);
    saw_zero = sample_mixture(0.5, 1000, s).min() == 0.0;
  }
  CHECK(saw_zero);

  rng::Stream a(5, 5, rng::Purpose::sampling);
  rng::Stream b(5, 5, rng::Purpose::sampling);
  const auto xa = sample_mixture(0.3, 50, a);
  const auto xb = sample_mixture(0.3, 50, b);
  CHECK(std::ranges::equal(xa.values(), xb.values()));

  rng::Stream c(5, 5, rng::Purpose::sampling);
  CHECK_THROWS_AS(sample_mixture(1.5, 10, c), ParameterError);
  CHECK_THROWS_AS(sample_mixture(0.5, 0, c), ParameterError);
}

TEST_CASE("config validation")
{
  CHECK_NOTHROW(validate(ExperimentConfig{}));
  auto bad = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    CHECK_THROWS_AS(validate(c), ParameterError);
  };
  bad([](ExperimentConfig& c) { c.pi = -0.1; });
  bad([](ExperimentConfig& c) { c.pi = 1.1; });
  bad([](ExperimentConfig& c) { c.n = 1; });
  bad([](ExperimentConfig& c) { c.reps = 0; });
  bad([](ExperimentConfig& c) { c.alpha = 0.0; });
  bad([](ExperimentConfig& c) { c.alpha = 1.0; });
  bad([](ExperimentConfig& c) { c.bootstrap = 50; });
  bad([](ExperimentConfig& c) { c.bandwidth.objective = Objective::fixed; });
}

TEST_CASE("replications are reproducible")
{
  const auto config = small_config(0.5, 120, 1);
  for (std::size_t rep : {0u, 7u, 31u}) {
    const auto a = run_replication(config, rep);
    const auto b = run_replication(config, rep);
    CHECK(same_record(a, b));
    CHECK(a.rep_index == rep);
    CHECK(a.n_d_poisson == Approx(120 * a.d_poisson));
    CHECK(a.n_d_geometric == Approx(120 * a.d_geometric));
    CHECK(a.mkld == Approx(a.d_bias_reduced_geometric / a.d_classical_geometric));
  }
  CHECK_FALSE(same_record(run_replication(config, 0), run_replication(config, 1)));
}

TEST_CASE("fixed bandwidth policy")
{
  auto config = small_config(1.0, 100, 1);
  config.bandwidth = {.objective = Objective::fixed, .fixed_h = 0.8};
  const auto r = run_replication(config, 0);
  CHECK(r.h_bias_reduced == 0.8);
  CHECK(r.h_classical == 0.8);
}

TEST_CASE("Poisson rate estimates concentrate")
{
  auto config = small_config(1.0, 250, 200);
  const auto report = run_experiment(config);
  const auto inside = std::ranges::count_if(
    report.records, [](const ReplicationRecord& r) { return r.lambda_hat >= 8.0 && r.lambda_hat <= 10.0; });
  CHECK(static_cast<double>(inside) >= 0.99 * 200);
  CHECK(report.pct_model_1 + report.pct_model_2 + report.pct_indecisive == Approx(100.0).epsilon(1e-3));
  CHECK(report.records.size() == 200);
  CHECK(report.lambda_hat.count == 200);
  CHECK(report.pct_model_1 >= 90.0);
}

TEST_CASE("report does not depend on worker count")
{
  auto config = small_config(0.5, 80, 12);
  config.threads = 1;
  const auto one = run_experiment(config);
  config.threads = 4;
  const auto four = run_experiment(config);
  REQUIRE(one.records.size() == four.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(same_record(one.records[i], four.records[i]));
  }
  CHECK(same_bits(one.kl_n.mean, four.kl_n.mean));
  CHECK(same_bits(one.mkld.sd, four.mkld.sd));
  CHECK(one.pct_model_1 == four.pct_model_1);
}

TEST_CASE("balanced mixture sits between the models")
{
  auto config = small_config(0.5, 250, 60);
  const auto report = run_experiment(config);
  const double dp = report.d_poisson.mean;
  const double dg = report.d_geometric.mean;
  CHECK(std::abs(dp - dg) <= 0.35 * std::max(dp, dg));
}

TEST_CASE("moments")
{
  const std::array xs{1.0, 2.0, 3.0, std::nan(""), 4.0};
  const auto m = moments(xs);
  CHECK(m.count == 4);
  CHECK(m.mean == Approx(2.5));
  CHECK(m.sd == Approx(std::sqrt(5.0 / 3.0)));
  const auto empty = moments(std::span<const double>{});
  CHECK(empty.count == 0);
}

TEST_CASE("rate experiment slopes")
{
  const std::array<std::size_t, 5> ns{200, 400, 800, 1600, 3200};
  const auto br = mse_rate_experiment(ns, 400, 0.0, 42, EstimatorKind::bias_reduced);
  CHECK(br.slope >= -1.05);
  CHECK(br.slope <= -0.70);
  REQUIRE(br.points.size() == 5);
  CHECK(br.points[0].h == Approx(std::pow(200.0, -1.0 / 9.0)));
  const auto cl = mse_rate_experiment(ns, 400, 0.0, 42, EstimatorKind::classical);
  CHECK(cl.slope >= -0.95);
  CHECK(cl.slope <= -0.60);
  CHECK(cl.points[0].h == Approx(std::pow(200.0, -0.2)));

  const auto doubled = mse_rate_experiment(ns, 800, 0.0, 42, EstimatorKind::bias_reduced);
  CHECK(std::abs(doubled.slope - br.slope) < 0.05);

  const std::array<std::size_t, 3> few{100, 200, 400};
  CHECK_THROWS_AS(mse_rate_experiment(few, 400, 0.0, 1), ParameterError);
  const std::array<std::size_t, 4> dup{100, 100, 200, 400};
  CHECK_THROWS_AS(mse_rate_experiment(dup, 400, 0.0, 1), ParameterError);
  CHECK_THROWS_AS(mse_rate_experiment(ns, 199, 0.0, 1), ParameterError);
}

TEST_CASE("histogram overlay")
{
  const Sample s({0.0, 2.0, 2.0, 3.0});
  const auto rows = histogram_overlay(s);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].count == 0);
  CHECK(rows[2].count == 2);
  CHECK(rows[2].frequency == Approx(0.5));
  const double lambda = 7.0 / 4.0;
  CHECK(rows[0].poisson_pmf == Approx(std::exp(-lambda)));
  CHECK(rows[0].geometric_pmf == 0.0);
}
