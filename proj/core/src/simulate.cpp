#include "wqes/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "wqes/parallel.hpp"
#include "wqes/special.hpp"

namespace wqes {

DgpSpec DgpSpec::model_1() {
  DgpSpec s;
  s.form = DgpForm::AvGarchT;
  return s;
}

DgpSpec DgpSpec::model_2() {
  DgpSpec s;
  s.form = DgpForm::GarchT;
  return s;
}

namespace {

void check_spec(const DgpSpec& spec) {
  if (!(spec.omega > 0.0) || spec.gamma < 0.0 || spec.delta < 0.0)
    throw std::domain_error("simulate: omega must be positive, gamma/delta nonnegative");
  if (!(spec.nu > 2.0)) throw std::domain_error("simulate: nu must exceed 2");
  if (spec.n < 1) throw std::domain_error("simulate: n must be positive");
}

double initial_sigma(const DgpSpec& spec) {
  if (spec.form == DgpForm::GarchT) {
    const double denom = 1.0 - spec.gamma - spec.delta;
    if (!(denom > 0.0))
      throw std::domain_error("simulate: squared recursion is not stationary");
    return std::sqrt(spec.omega / denom);
  }
  const double abs_mean = std_t_abs_mean({spec.nu});
  const double denom = 1.0 - spec.gamma * abs_mean - spec.delta;
  if (!(denom > 0.0))
    throw std::domain_error("simulate: absolute-value recursion is not stationary");
  return spec.omega / denom;
}

}  // namespace

SimulatedPath simulate_with_seed(const DgpSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  const double s = std_t_scale(spec.nu);
  const double sigma1 = initial_sigma(spec);

  std::mt19937_64 rng(seed);
  std::student_t_distribution<double> t_dist(spec.nu);

  SimulatedPath out;
  const auto n = static_cast<std::size_t>(spec.n);
  out.returns.resize(n);
  out.sigma.resize(n);

  double sigma = sigma1;
  for (std::size_t t = 0; t < n; ++t) {
    out.sigma[t] = sigma;
    const double eps = t_dist(rng) * s;
    out.returns[t] = sigma * eps;
    if (spec.form == DgpForm::AvGarchT) {
      sigma = spec.omega + spec.gamma * std::fabs(out.returns[t]) + spec.delta * sigma;
    } else {
      const double s2 = spec.omega + spec.gamma * out.returns[t] * out.returns[t] +
                        spec.delta * sigma * sigma;
      sigma = std::sqrt(s2);
    }
  }
  out.sigma_next = sigma;
  return out;
}

SimulatedPath simulate(const DgpSpec& spec) {
  return simulate_with_seed(spec, spec.rng_seed);
}

double true_var(double sigma_next, double alpha, double nu) {
  return student_t_var_es(sigma_next, alpha, {nu}).var;
}

double true_es(double sigma_next, double alpha, double nu) {
  return student_t_var_es(sigma_next, alpha, {nu}).es;
}

namespace {

struct RepOutcome {
  bool ok = false;
  std::string error;
  double true_var_value = 0.0;
  double true_es_value = 0.0;
  double var_forecast = 0.0;                  // target level, first grid group
  std::map<std::size_t, double> es_forecast;  // cell index -> forecast
  std::vector<WeightSample> weights;
};

}  // namespace

BiasReport run_bias_study(const DgpSpec& spec, const BiasStudyConfig& cfg) {
  if (cfg.m_set.empty() || cfg.alpha1_set.empty() || cfg.variants.empty())
    throw std::domain_error("run_bias_study: empty design");
  for (int m : cfg.m_set)
    if (m < 2) throw std::domain_error("run_bias_study: M must be at least 2");
  for (double a1 : cfg.alpha1_set)
    if (!(a1 > 0.0) || !(a1 < cfg.alpha))
      throw std::domain_error("run_bias_study: alpha1 must lie in (0, alpha)");

  // Flattened cell layout: groups (m, alpha1) x variants.
  struct Group {
    int m;
    double alpha1;
  };
  std::vector<Group> groups;
  for (int m : cfg.m_set)
    for (double a1 : cfg.alpha1_set) groups.push_back({m, a1});
  const std::size_t n_variants = cfg.variants.size();
  const std::size_t n_cells = groups.size() * n_variants;

  const auto n_reps = static_cast<std::size_t>(spec.n_reps);
  std::vector<RepOutcome> outcomes(n_reps);

  parallel_for(n_reps, cfg.workers, [&](std::size_t rep) {
    RepOutcome& out = outcomes[rep];
    try {
      const SimulatedPath path =
          simulate_with_seed(spec, derive_seed(spec.rng_seed, rep));
      out.true_var_value = true_var(path.sigma_next, cfg.alpha, spec.nu);
      out.true_es_value = true_es(path.sigma_next, cfg.alpha, spec.nu);
      ReturnSeries series;
      series.values = path.returns;

      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        // One extended grid (M+1 levels) serves all variants of the group:
        // the first M levels are exactly the plain grid.
        const QuantileGrid grid = build_grid(cfg.alpha, groups[gi].alpha1,
                                             groups[gi].m, EsVariantTag::WqBeta);
        MultiStartConfig fit_cfg = cfg.fit_cfg;
        fit_cfg.rng_seed = derive_seed(cfg.fit_cfg.rng_seed, rep * 1000 + gi);
        fit_cfg.workers = 1;  // parallelism lives at the replication level
        const CaviarGridFit gf =
            fit_caviar_grid(series, grid, cfg.caviar_form, fit_cfg);
        if (gi == 0)
          out.var_forecast = gf.matrix.forecasts[grid.target_index];

        for (std::size_t vi = 0; vi < n_variants; ++vi) {
          const EsVariant variant{cfg.variants[vi], groups[gi].m, groups[gi].alpha1};
          const EsWeightFit wfit =
              fit_es_weights(series, gf.matrix, variant, fit_cfg);
          const EsForecast fc = forecast_es(wfit, gf.matrix);
          out.es_forecast[gi * n_variants + vi] = fc.es;
          if (variant.tag == EsVariantTag::WqBeta && wfit.beta_params) {
            WeightSample ws;
            ws.rep = rep;
            ws.m = variant.m;
            ws.alpha1 = variant.alpha1;
            ws.a = wfit.beta_params->a;
            ws.b = wfit.beta_params->b;
            ws.levels = wfit.grid.levels;
            ws.weights = wfit.derived_weights;
            out.weights.push_back(std::move(ws));
          }
        }
      }
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  });

  BiasReport report;
  double sum_true_var = 0.0, sum_true_es = 0.0, sum_var_fc = 0.0;
  double sum_abs_var_err = 0.0;
  std::vector<double> sum_es_fc(n_cells, 0.0), sum_abs_es_err(n_cells, 0.0);
  for (std::size_t rep = 0; rep < n_reps; ++rep) {
    const RepOutcome& out = outcomes[rep];
    if (!out.ok) {
      ++report.n_failed;
      report.failures.push_back("rep " + std::to_string(rep) + ": " + out.error);
      continue;
    }
    ++report.n_reps_done;
    sum_true_var += out.true_var_value;
    sum_true_es += out.true_es_value;
    sum_var_fc += out.var_forecast;
    sum_abs_var_err += std::fabs(out.var_forecast - out.true_var_value);
    for (const auto& [cell, fc] : out.es_forecast) {
      sum_es_fc[cell] += fc;
      sum_abs_es_err[cell] += std::fabs(fc - out.true_es_value);
    }
    for (const auto& ws : out.weights) report.weight_samples.push_back(ws);
  }
  if (report.n_reps_done == 0)
    throw std::runtime_error("run_bias_study: every replication failed");

  const auto n_ok = static_cast<double>(report.n_reps_done);
  report.mean_true_var = sum_true_var / n_ok;
  report.mean_true_es = sum_true_es / n_ok;
  report.var_delta = std::fabs(sum_var_fc / n_ok - report.mean_true_var);
  report.var_mad = sum_abs_var_err / n_ok;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t vi = 0; vi < n_variants; ++vi) {
      BiasCell cell;
      cell.tag = cfg.variants[vi];
      cell.m = groups[gi].m;
      cell.alpha1 = groups[gi].alpha1;
      const std::size_t idx = gi * n_variants + vi;
      cell.es_delta = std::fabs(sum_es_fc[idx] / n_ok - report.mean_true_es);
      cell.es_mad = sum_abs_es_err[idx] / n_ok;
      report.cells.push_back(cell);
    }
  }
  return report;
}

}  // namespace wqes
