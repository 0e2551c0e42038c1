#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "wqes/baselines.hpp"
#include "wqes/parallel.hpp"

using namespace wqes;

TEST_SUITE_BEGIN("baselines");

namespace {
MultiStartConfig fit_cfg(std::uint64_t seed, std::size_t candidates = 800) {
  MultiStartConfig cfg;
  cfg.n_candidates = candidates;
  cfg.n_refine = 2;
  cfg.rng_seed = seed;
  return cfg;
}
}  // namespace

TEST_CASE("multiplicative es is an exact rescaling of var") {
  const ReturnSeries series = test::sim_series(201, 1000);
  const EsCaviarFit fit = fit_es_caviar(series, 0.025, EsCaviarForm::Mult,
                                        CaviarForm::Sav, fit_cfg(11));
  const double mult = 1.0 + std::exp(fit.gamma[0]);
  for (std::size_t t = 0; t < series.size(); ++t)
    CHECK(fit.es_path[t] == doctest::Approx(mult * fit.var_path[t]).epsilon(1e-14));
  CHECK(fit.es_forecast == doctest::Approx(mult * fit.var_forecast).epsilon(1e-14));
}

TEST_CASE("fitted multiplier tracks the tail expectation ratio") {
  // ES/VaR for standardized t(10) at the 2.5% level is 1.2652.
  const ReturnSeries series = test::sim_series(202);
  const EsCaviarFit fit = fit_es_caviar(series, 0.025, EsCaviarForm::Mult,
                                        CaviarForm::Sav, fit_cfg(12));
  CHECK(1.0 + std::exp(fit.gamma[0]) == doctest::Approx(1.265).epsilon(0.05 / 1.265));
}

TEST_CASE("multiplicative form with asymmetric slopes") {
  const ReturnSeries series = test::sim_series(207, 600);
  const EsCaviarFit fit = fit_es_caviar(series, 0.025, EsCaviarForm::Mult,
                                        CaviarForm::As, fit_cfg(18, 400));
  CHECK(fit.beta.size() == 4);
  CHECK(fit.gamma.size() == 1);
  const double mult = 1.0 + std::exp(fit.gamma[0]);
  for (std::size_t t = 0; t < series.size(); ++t)
    CHECK(fit.es_path[t] == doctest::Approx(mult * fit.var_path[t]).epsilon(1e-14));
}

TEST_CASE("additive gap keeps es on the far side of var") {
  const ReturnSeries series = test::sim_series(203, 1000);
  const EsCaviarFit fit = fit_es_caviar(series, 0.025, EsCaviarForm::Add,
                                        CaviarForm::Sav, fit_cfg(13, 2000));
  CHECK(fit.x_init >= 0.0);
  for (double g : fit.gamma) CHECK(g >= 0.0);
  for (std::size_t t = 0; t < series.size(); ++t) {
    CHECK(fit.es_path[t] <= fit.var_path[t]);
    CHECK(fit.var_path[t] < 0.0);
  }
  CHECK(fit.es_forecast <= fit.var_forecast);
}

TEST_CASE("degenerating the multiplier toward es = var raises the loss") {
  const ReturnSeries series = test::sim_series(204, 800);
  const EsCaviarFit fit = fit_es_caviar(series, 0.025, EsCaviarForm::Mult,
                                        CaviarForm::Sav, fit_cfg(14));
  // 1-D scan in gamma0 below the optimum: pushing es toward the var boundary
  // must increase the aggregate score monotonically.
  const auto loss_at = [&](double g0) {
    const double mult = 1.0 + std::exp(g0);
    double loss = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t)
      loss += al_joint_loss(series.values[t], fit.var_path[t],
                            mult * fit.var_path[t], 0.025);
    return loss;
  };
  double prev = loss_at(fit.gamma[0]);
  for (int k = 1; k <= 8; ++k) {
    const double cur = loss_at(fit.gamma[0] - 1.0 * k);
    CHECK(cur >= prev - 1e-9);
    prev = cur;
  }
}

TEST_CASE("care scale factor") {
  // scale(tau, alpha) = 1 + tau/((1-2 tau) alpha)
  const ReturnSeries series = test::sim_series(205, 600);
  const CareFit fit = fit_care_sav(series, 0.025, 10, fit_cfg(15, 300));
  CHECK(fit.scale ==
        doctest::Approx(1.0 + fit.tau / ((1.0 - 2.0 * fit.tau) * 0.025))
            .epsilon(1e-12));
  CHECK(fit.scale > 1.0);
  // Hand value at tau = 0.01, alpha = 0.025.
  const double scale = 1.0 + 0.01 / ((1.0 - 0.02) * 0.025);
  CHECK(scale == doctest::Approx(1.40816).epsilon(1e-5));
}

TEST_CASE("care selects an expectile level below the quantile level") {
  // Gaussian returns: the expectile matching the 2.5% quantile sits near
  // tau = 0.0086 < alpha.
  for (std::uint64_t seed : {401ULL, 402ULL, 403ULL}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ReturnSeries series;
    series.values.resize(1500);
    for (double& r : series.values) r = normal(rng);
    const CareFit fit = fit_care_sav(series, 0.025, 25, fit_cfg(seed, 300));
    CHECK(fit.tau < 0.025);
    CHECK(fit.violation_rate == doctest::Approx(0.025).epsilon(0.5));
  }
}

TEST_CASE("care fit beats zero parameters and es sits beyond var") {
  const ReturnSeries series = test::sim_series(206, 700);
  const CareFit fit = fit_care_sav(series, 0.025, 10, fit_cfg(16, 300));
  double zero_loss = 0.0;
  for (double r : series.values)
    zero_loss += std::fabs(fit.tau - (r < 0.0 ? 1.0 : 0.0)) * r * r;
  CHECK(fit.als_loss <= zero_loss);
  CHECK(fit.crossing_flags == 0);  // negative expectile path on this data
  for (std::size_t t = 0; t < series.size(); ++t)
    CHECK(fit.es_path[t] <= fit.var_path[t]);
}

TEST_CASE("garch-t recovers persistence on a long sample") {
  DgpSpec spec = DgpSpec::model_2();
  spec.omega = 0.02;
  spec.n = 5000;
  ReturnSeries series;
  series.values = simulate_with_seed(spec, 77).returns;
  const GarchTFit fit = fit_garch_t(series, 0.025, fit_cfg(17));
  CHECK(fit.gamma + fit.delta == doctest::Approx(0.95).epsilon(0.05 / 0.95));
  CHECK(std::fabs(fit.es_forecast) > std::fabs(fit.var_forecast));
  CHECK(fit.var_forecast < 0.0);
}

TEST_CASE("garch-t forecast formulas at unit volatility") {
  // sigma_{N+1} = 1, alpha = 0.025, nu = 10 gives VaR ~ -1.993.
  const VarEs ve = student_t_var_es(1.0, 0.025, {10.0});
  CHECK(ve.var == doctest::Approx(-1.993).epsilon(1e-3));
  CHECK(ve.es == doctest::Approx(-2.5214).epsilon(1e-3));
}

TEST_CASE("baselines reject short series") {
  ReturnSeries tiny;
  tiny.values.assign(200, -0.1);
  CHECK_THROWS_AS(
      fit_es_caviar(tiny, 0.025, EsCaviarForm::Mult, CaviarForm::Sav, fit_cfg(1)),
      std::domain_error);
  CHECK_THROWS_AS(fit_care_sav(tiny, 0.025, 50, fit_cfg(1)), std::domain_error);
  CHECK_THROWS_AS(fit_garch_t(tiny, 0.025, fit_cfg(1)), std::domain_error);
  ReturnSeries ok = test::sim_series(1, 300);
  CHECK_THROWS_AS(fit_care_sav(ok, 0.025, 0, fit_cfg(1)), std::domain_error);
}

TEST_SUITE_END();
