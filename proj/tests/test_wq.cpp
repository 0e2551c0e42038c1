#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "wqes/caviar.hpp"
#include "wqes/special.hpp"
#include "wqes/wq.hpp"

using namespace wqes;

TEST_SUITE_BEGIN("wq");

namespace {

MultiStartConfig fit_cfg(std::uint64_t seed) {
  MultiStartConfig cfg;
  cfg.n_candidates = 400;
  cfg.n_refine = 2;
  cfg.rng_seed = seed;
  return cfg;
}

EsWeightFit manual_fit(EsVariantTag tag, double w0, std::vector<double> weights,
                       std::size_t target_index) {
  EsWeightFit fit;
  fit.tag = tag;
  fit.w0 = w0;
  fit.derived_weights = std::move(weights);
  fit.grid.levels.assign(fit.derived_weights.size(), 0.0);
  fit.grid.target_index = target_index;
  for (double w : fit.derived_weights) fit.theta += w;
  return fit;
}

// Quantile matrix with rows q_row * scale_t, plus matching target column.
QuantileMatrix scaled_matrix(const std::vector<double>& base_row,
                             const std::vector<double>& scales,
                             const QuantileGrid& grid) {
  QuantileMatrix qm;
  qm.grid = grid;
  qm.n_rows = scales.size();
  qm.values.resize(qm.n_rows * grid.size());
  for (std::size_t t = 0; t < qm.n_rows; ++t)
    for (std::size_t i = 0; i < grid.size(); ++i)
      qm.values[t * grid.size() + i] = base_row[i] * scales[t];
  qm.forecasts.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) qm.forecasts[i] = base_row[i];
  return qm;
}

}  // namespace

TEST_CASE("grid construction") {
  const QuantileGrid g = build_grid(0.025, 0.005, 10, EsVariantTag::SaBc);
  CHECK(g.size() == 10);
  CHECK(g.levels.front() == doctest::Approx(0.005));
  CHECK(g.levels.back() == 0.025);
  CHECK(g.target() == 0.025);

  const QuantileGrid gb = build_grid(0.025, 0.005, 10, EsVariantTag::WqBeta);
  CHECK(gb.size() == 11);
  CHECK(gb.levels[10] == doctest::Approx(0.025 + 0.02 / 9.0).epsilon(1e-12));
  CHECK(gb.target() == 0.025);
  CHECK(gb.target_index == 9);

  const QuantileGrid g2 = build_grid(0.025, 0.02, 2, EsVariantTag::SaNoBc);
  CHECK(g2.size() == 2);
  CHECK(g2.levels[1] - g2.levels[0] == doctest::Approx(0.005));

  CHECK_THROWS_AS(build_grid(0.025, 0.025, 3, EsVariantTag::SaBc), std::domain_error);
  CHECK_THROWS_AS(build_grid(0.025, 0.03, 3, EsVariantTag::SaBc), std::domain_error);
  CHECK_THROWS_AS(build_grid(0.025, 0.01, 1, EsVariantTag::SaBc), std::domain_error);
}

TEST_CASE("beta weight vectors") {
  CHECK(weights_from_beta({1.0, 1.0}, 4) == std::vector<double>{1.0, 1.0, 1.0, 1.0});
  const std::vector<double> w23 = weights_from_beta({2.0, 3.0}, 4);
  CHECK(w23[3] == 0.0);
  const std::vector<double> w12 = weights_from_beta({1.0, 2.0}, 4);
  CHECK(w12[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(w12[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w12[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w12[3] == doctest::Approx(0.0));
  CHECK_THROWS_AS(weights_from_beta({1.0, 1.0}, 1), std::domain_error);
}

TEST_CASE("es estimate variants") {
  const std::vector<double> row{-3.0, -2.0, -1.0};
  CHECK(es_estimate(manual_fit(EsVariantTag::SaNoBc, 0.0,
                               {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2),
                    row) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(es_estimate(manual_fit(EsVariantTag::SaBc, -0.1,
                               {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2),
                    row) == doctest::Approx(-2.1).epsilon(1e-12));
  CHECK(es_estimate(manual_fit(EsVariantTag::WqEw, 0.0, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2),
                    row) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_THROWS_AS(
      es_estimate(manual_fit(EsVariantTag::SaBc, 0.0, {0.5, 0.5}, 1), row),
      std::domain_error);
}

TEST_CASE("joint score hand values") {
  CHECK(al_joint_loss(-3.0, -2.0, -2.5, 0.025) ==
        doctest::Approx(16.5416).epsilon(1e-4));
  CHECK(al_joint_loss(1.0, -2.0, -2.5, 0.025) ==
        doctest::Approx(2.1416).epsilon(1e-4));
  CHECK_THROWS_AS(al_joint_loss(0.0, -2.0, 1.0, 0.025), std::domain_error);
  CHECK_THROWS_AS(al_joint_loss(0.0, -2.0, 0.0, 0.025), std::domain_error);
}

TEST_CASE("score is self-consistent at its own es parameter") {
  // Population first-order condition: for r ~ AL(q, e), the partial minimizer
  // of E S(r, q, es) over es is -E[(r-q)(alpha - I(r<=q))]/alpha = e.
  const double alpha = 0.025;
  const double q = -2.0, e = -2.6;
  const double c = (alpha - 1.0) / (alpha * e);
  const auto al_density = [&](double r) {
    const double z = r <= q ? std::exp(c * (r - q)) : std::exp((r - q) / e);
    return ((alpha - 1.0) / e) * z;
  };
  const auto a_term = [&](double r) {
    const double ind = r <= q ? 1.0 : 0.0;
    return (r - q) * (alpha - ind) / alpha;
  };
  // Integrate each smooth branch separately; the density has a kink at q.
  const auto piecewise = [&](const std::function<double(double)>& f) {
    return test::simpson_oracle(f, q - 40.0, q, 200000) +
           test::simpson_oracle(f, q, q + 160.0, 200000);
  };
  const double mass = piecewise(al_density);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  const double mean_a =
      piecewise([&](double r) { return a_term(r) * al_density(r); });
  CHECK(-mean_a == doctest::Approx(e).epsilon(1e-6));
}

TEST_CASE("sa-bc intercept vanishes when the row mean is the al parameter") {
  // Returns drawn from the AL density whose es parameter equals the equally
  // weighted row mean; the fitted bias correction must then be zero up to
  // Monte-Carlo error (3 sigma with sd ~= |es|/sqrt(N)).
  const double alpha = 0.025;
  const QuantileGrid grid = build_grid(alpha, 0.015, 3, EsVariantTag::SaBc);
  const std::vector<double> base_row{-2.8, -2.5, -2.2};
  const std::size_t n = 400000;
  std::vector<double> scales(n, 1.0);
  const QuantileMatrix qm = scaled_matrix(base_row, scales, grid);
  const double row_mean = (-2.8 - 2.5 - 2.2) / 3.0;

  ReturnSeries series;
  series.values.resize(n);
  std::mt19937_64 rng(2024);
  for (double& r : series.values)
    r = test::al_draw(rng, base_row.back(), row_mean, alpha);
  const EsVariant variant{EsVariantTag::SaBc, 3, 0.015};
  const EsWeightFit fit = fit_es_weights(series, qm, variant, fit_cfg(7));
  const double tol = 3.0 * std::fabs(row_mean) / std::sqrt(static_cast<double>(n));
  CHECK(std::fabs(fit.w0) <= tol);
}

TEST_CASE("unconstrained weights stay nonnegative") {
  const ReturnSeries series = test::sim_series(301, 900);
  const QuantileGrid grid = build_grid(0.025, 0.01, 3, EsVariantTag::WqUnc);
  const CaviarGridFit gf =
      fit_caviar_grid(series, grid, CaviarForm::Sav, fit_cfg(3));
  const EsWeightFit fit = fit_es_weights(
      series, gf.matrix, {EsVariantTag::WqUnc, 3, 0.01}, fit_cfg(4));
  REQUIRE(fit.w_vector.has_value());
  for (double w : *fit.w_vector) CHECK(w >= 0.0);
  for (double w : fit.derived_weights) CHECK(w >= 0.0);
}

TEST_CASE("forecast evaluation and clamping") {
  const std::vector<double> row{-3.0, -2.0, -1.0};
  const EsWeightFit sa = manual_fit(EsVariantTag::SaNoBc, 0.0,
                                    {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2);
  const EsForecast fc = forecast_es(sa, row);
  CHECK(fc.es == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fc.var == doctest::Approx(-1.0));
  CHECK_FALSE(fc.clamped);

  // Fitted b > 1 pins the appended grid point's weight (and contribution) to 0.
  EsWeightFit beta = manual_fit(EsVariantTag::WqBeta, 0.0,
                                weights_from_beta({1.0, 2.0}, 4), 2);
  beta.beta_params = BetaWeightParams{1.0, 2.0};
  const EsForecast bf = forecast_es(beta, std::vector<double>{-4.0, -3.0, -2.0, -1.9});
  CHECK(bf.components[3] == 0.0);

  // Large positive intercept forces es above var; clamped and flagged.
  const EsWeightFit crossed = manual_fit(EsVariantTag::SaBc, 5.0,
                                         {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2);
  const EsForecast cf = forecast_es(crossed, row);
  CHECK(cf.clamped);
  CHECK(cf.es == cf.var);
}

TEST_CASE("common-persistence weighted es follows its own recursion") {
  // All levels share beta2; the composed ES path must satisfy
  // ES_t = w0(1-b2) + sum_i w_i b0_i + (sum_i w_i b1_i)|r_(t-1)| + b2 ES_(t-1)
  // exactly.
  const double b2 = 0.85;
  const std::vector<double> levels{0.01, 0.0175, 0.025};
  std::vector<std::vector<double>> params;
  std::vector<double> q_inits;
  for (double lev : levels) {
    const double q = std_t_inv_cdf(lev, {10.0});
    params.push_back({0.05 * q, 0.10 * q, b2});
    q_inits.push_back(q);
  }
  const ReturnSeries series = test::sim_series(77, 400);
  std::vector<std::vector<double>> paths;
  for (std::size_t i = 0; i < levels.size(); ++i)
    paths.push_back(
        caviar_filter(CaviarForm::Sav, {params[i]}, series.values, q_inits[i]));

  const double w0 = -0.1;
  const std::vector<double> w{0.2, 0.3, 0.4};
  std::vector<double> es(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    es[t] = w0;
    for (std::size_t i = 0; i < w.size(); ++i) es[t] += w[i] * paths[i][t];
  }
  double bar0 = 0.0, bar1 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    bar0 += w[i] * params[i][0];
    bar1 += w[i] * params[i][1];
  }
  const double b_star = w0 * (1.0 - b2) + bar0;
  for (std::size_t t = 1; t < series.size(); ++t) {
    const double rhs = b_star + bar1 * std::fabs(series.values[t - 1]) + b2 * es[t - 1];
    CHECK(std::fabs(es[t] - rhs) <= 1e-12 * (1.0 + std::fabs(es[t])));
  }
}

TEST_CASE("nesting identities and reparameterization") {
  std::mt19937_64 rng(9);
  const auto runif = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  SUBCASE("equal-weight scalar reproduces the simple averages") {
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> row(4);
      for (double& v : row) v = -3.0 + 2.0 * runif();
      const double w0 = runif() - 0.5;
      const EsWeightFit ew =
          manual_fit(EsVariantTag::WqEw, w0, std::vector<double>(4, 0.25), 3);
      const EsWeightFit sabc =
          manual_fit(EsVariantTag::SaBc, w0, std::vector<double>(4, 0.25), 3);
      CHECK(es_estimate(ew, row) == es_estimate(sabc, row));
      const EsWeightFit ew0 =
          manual_fit(EsVariantTag::WqEw, 0.0, std::vector<double>(4, 0.25), 3);
      const EsWeightFit sanobc =
          manual_fit(EsVariantTag::SaNoBc, 0.0, std::vector<double>(4, 0.25), 3);
      CHECK(es_estimate(ew0, row) == es_estimate(sanobc, row));
    }
  }

  SUBCASE("weights split into normalized weights times their sum") {
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> w(5), row(5);
      double theta = 0.0;
      for (std::size_t i = 0; i < 5; ++i) {
        w[i] = 0.1 + runif();
        row[i] = -4.0 + 3.0 * runif();
        theta += w[i];
      }
      const double w0 = runif() - 0.5;
      double direct = w0, split = w0;
      for (std::size_t i = 0; i < 5; ++i) {
        direct += w[i] * row[i];
        split += theta * (w[i] / theta) * row[i];
      }
      CHECK(std::fabs(direct - split) <= 1e-12 * (1.0 + std::fabs(direct)));
    }
  }
}

TEST_CASE("fitted losses respect the nesting chain") {
  const ReturnSeries series = test::sim_series(121, 1000);
  const QuantileGrid grid = build_grid(0.025, 0.01, 3, EsVariantTag::WqBeta);
  const CaviarGridFit gf =
      fit_caviar_grid(series, grid, CaviarForm::Sav, fit_cfg(5));
  const auto fit_variant = [&](EsVariantTag tag) {
    return fit_es_weights(series, gf.matrix, {tag, 3, 0.01}, fit_cfg(6));
  };
  const double ew = fit_variant(EsVariantTag::WqEw).loss;
  const double sabc = fit_variant(EsVariantTag::SaBc).loss;
  const double sanobc = fit_variant(EsVariantTag::SaNoBc).loss;
  CHECK(ew <= sabc + 1e-9 * std::fabs(sabc));
  CHECK(sabc <= sanobc + 1e-9 * std::fabs(sanobc));
}

TEST_CASE("no negative-es candidate means failure with diagnostics") {
  // Positive quantiles cannot produce a negative weighted average.
  const QuantileGrid grid = build_grid(0.025, 0.015, 3, EsVariantTag::SaBc);
  std::vector<double> scales(300, 1.0);
  const QuantileMatrix qm = scaled_matrix({1.0, 2.0, 3.0}, scales, grid);
  ReturnSeries series;
  series.values.assign(300, 5.0);
  CHECK_THROWS_AS(fit_es_weights(series, qm, {EsVariantTag::SaBc, 3, 0.015},
                                 fit_cfg(8)),
                  OptimizationError);
}

TEST_SUITE_END();
