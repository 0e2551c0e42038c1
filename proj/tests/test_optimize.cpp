#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wqes/caviar.hpp"
#include "wqes/optimize.hpp"

using namespace wqes;

TEST_SUITE_BEGIN("optimize");

namespace {

MultiStartConfig small_cfg(std::uint64_t seed) {
  MultiStartConfig cfg;
  cfg.n_candidates = 500;
  cfg.n_refine = 2;
  cfg.rng_seed = seed;
  return cfg;
}

BoxConstraints unit_box(std::size_t dim) {
  BoxConstraints box;
  box.lower.assign(dim, 0.0);
  box.upper.assign(dim, 1.0);
  return box;
}

}  // namespace

TEST_CASE("convex quadratic in the unit box") {
  const Objective f = [](const std::vector<double>& x) {
    return (x[0] - 0.3) * (x[0] - 0.3) + (x[1] - 0.7) * (x[1] - 0.7);
  };
  const MinimizeResult res = minimize_multistart(f, 2, small_cfg(11), unit_box(2));
  CHECK(res.x[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(res.x[1] == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(res.value <= res.diagnostics.best_candidate_value);
}

TEST_CASE("same seed gives bit-identical output") {
  const Objective f = [](const std::vector<double>& x) {
    return std::sin(5.0 * x[0]) + x[1] * x[1] + 0.3 * x[0];
  };
  const MinimizeResult a = minimize_multistart(f, 2, small_cfg(99), unit_box(2));
  MultiStartConfig par = small_cfg(99);
  par.workers = 4;  // parallel stage-1 must not change the result
  const MinimizeResult b = minimize_multistart(f, 2, par, unit_box(2));
  CHECK(a.value == b.value);
  CHECK(a.x[0] == b.x[0]);
  CHECK(a.x[1] == b.x[1]);
}

TEST_CASE("caviar quantile loss never beats the fitted optimum at the DGP point") {
  const ReturnSeries series = test::sim_series(71, 1200);
  const double alpha = 0.025;
  const double q_init =
      empirical_quantile({series.values.data(), 100}, alpha);
  const Objective f = [&](const std::vector<double>& theta) {
    const std::vector<double> path =
        caviar_filter(CaviarForm::Sav, {theta}, series.values, q_init);
    return quantile_loss(series.values, path, alpha);
  };
  // Quantile-scaled DGP parameters of the simulated volatility recursion.
  const double q_std = -1.9929079745207776;
  const std::vector<double> dgp_point{0.05 * q_std, 0.10 * q_std, 0.85};
  MultiStartConfig cfg = small_cfg(5);
  cfg.candidate_intervals = {{-1.0, 1.0}, {-1.0, 1.0}, {0.0, 1.0}};
  BoxConstraints box;
  box.lower = {-10.0, -10.0, -0.999};
  box.upper = {10.0, 10.0, 0.999};
  const MinimizeResult res = minimize_multistart(f, 3, cfg, box);
  CHECK(res.value <= f(dgp_point));
}

TEST_CASE("rosenbrock from the classic start") {
  const Objective f = [](const std::vector<double>& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  LocalOptions opts;
  opts.max_iterations = 2000;
  opts.gradient_tolerance = 1e-9;
  const MinimizeResult res =
      minimize_local(f, {-1.2, 1.0}, BoxConstraints::unbounded(2), opts);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("local descent from the minimum stays put") {
  const Objective f = [](const std::vector<double>& x) {
    return 3.0 + x[0] * x[0] + 2.0 * x[1] * x[1];
  };
  const MinimizeResult res =
      minimize_local(f, {0.0, 0.0}, BoxConstraints::unbounded(2));
  CHECK(res.value == doctest::Approx(3.0));
  CHECK(res.diagnostics.quasi_newton_iterations == 0);
  CHECK(res.diagnostics.converged);
}

TEST_CASE("box-clipped quadratic lands on the boundary") {
  const Objective f = [](const std::vector<double>& x) {
    return (x[0] - 2.0) * (x[0] - 2.0) + (x[1] - 3.0) * (x[1] - 3.0);
  };
  const MinimizeResult res = minimize_local(f, {0.5, 0.5}, unit_box(2));
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("descent never increases the start value") {
  const Objective f = [](const std::vector<double>& x) {
    return std::fabs(x[0] - 0.4) + 0.5 * std::fabs(x[1] + 0.2);  // kinked
  };
  const std::vector<double> start{0.9, 0.9};
  const MinimizeResult nm = nelder_mead(f, start, BoxConstraints::unbounded(2));
  CHECK(nm.value <= f(start));
  const MinimizeResult qn = minimize_local(f, start, BoxConstraints::unbounded(2));
  CHECK(qn.value <= f(start));
}

TEST_CASE("failure and validation paths") {
  const Objective bad = [](const std::vector<double>&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(minimize_multistart(bad, 2, small_cfg(1), unit_box(2)),
                  OptimizationError);
  try {
    minimize_multistart(bad, 2, small_cfg(1), unit_box(2));
  } catch (const OptimizationError& e) {
    CHECK(e.diagnostics.n_finite_candidates == 0);
    CHECK(e.diagnostics.n_evaluations == 500);
  }
  MultiStartConfig cfg = small_cfg(1);
  cfg.n_refine = cfg.n_candidates + 1;
  const Objective ok = [](const std::vector<double>& x) { return x[0]; };
  CHECK_THROWS_AS(minimize_multistart(ok, 1, cfg, unit_box(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(minimize_local(bad, {0.5}, unit_box(1)), std::domain_error);
}

TEST_SUITE_END();
