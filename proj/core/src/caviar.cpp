#include "wqes/caviar.hpp"

#include <algorithm>
#include <cmath>

#include "wqes/parallel.hpp"

namespace wqes {

std::size_t caviar_param_count(CaviarForm form) {
  return form == CaviarForm::Sav ? 3 : 4;
}

double quantile_loss(std::span<const double> returns,
                     std::span<const double> quantiles, double alpha) {
  if (returns.size() != quantiles.size())
    throw std::domain_error("quantile_loss: series length mismatch");
  if (returns.empty()) throw std::domain_error("quantile_loss: empty series");
  double sum = 0.0;
  for (std::size_t t = 0; t < returns.size(); ++t) {
    const double ind = returns[t] < quantiles[t] ? 1.0 : 0.0;
    sum += (alpha - ind) * (returns[t] - quantiles[t]);
  }
  return sum / static_cast<double>(returns.size());
}

double caviar_step(CaviarForm form, const CaviarParams& params, double r_prev,
                   double q_prev) {
  const auto& b = params.beta;
  if (form == CaviarForm::Sav)
    return b[0] + b[1] * std::fabs(r_prev) + b[2] * q_prev;
  return b[0] + b[1] * std::max(r_prev, 0.0) + b[2] * std::max(-r_prev, 0.0) +
         b[3] * q_prev;
}

std::vector<double> caviar_filter(CaviarForm form, const CaviarParams& params,
                                  std::span<const double> returns, double q_init) {
  if (params.beta.size() != caviar_param_count(form))
    throw std::domain_error("caviar_filter: wrong parameter count");
  std::vector<double> path(returns.size());
  if (returns.empty()) return path;
  path[0] = q_init;
  for (std::size_t t = 1; t < returns.size(); ++t)
    path[t] = caviar_step(form, params, returns[t - 1], path[t - 1]);
  return path;
}

std::vector<double> rearrange(std::vector<double> row) {
  std::sort(row.begin(), row.end());
  return row;
}

namespace {

double init_quantile(const ReturnSeries& returns, double alpha) {
  const std::size_t n0 = std::min<std::size_t>(returns.size(), 100);
  return empirical_quantile({returns.values.data(), n0}, alpha);
}

MultiStartConfig caviar_start_config(CaviarForm form, const MultiStartConfig& cfg) {
  MultiStartConfig out = cfg;
  // Slope and intercept starts need negative values reachable for lower-tail
  // quantiles; the autoregressive coefficient is sampled in [0,1].
  out.candidate_intervals.assign(caviar_param_count(form), {-1.0, 1.0});
  out.candidate_intervals.back() = {0.0, 1.0};
  return out;
}

BoxConstraints caviar_box(CaviarForm form) {
  const std::size_t dim = caviar_param_count(form);
  BoxConstraints box;
  box.lower.assign(dim, -10.0);
  box.upper.assign(dim, 10.0);
  box.lower.back() = -0.999;  // soft stationarity bound on the AR coefficient
  box.upper.back() = 0.999;
  return box;
}

}  // namespace

CaviarFit fit_caviar(const ReturnSeries& returns, double alpha, CaviarForm form,
                     const MultiStartConfig& cfg) {
  if (returns.size() < 250)
    throw std::domain_error("fit_caviar: need at least 250 observations");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("fit_caviar: alpha must lie in (0,1)");

  const double q_init = init_quantile(returns, alpha);
  std::span<const double> r{returns.values};

  const Objective objective = [&, q_init](const std::vector<double>& theta) {
    const CaviarParams p{theta};
    const std::vector<double> path = caviar_filter(form, p, r, q_init);
    return quantile_loss(r, path, alpha);
  };

  const MinimizeResult res = minimize_multistart(
      objective, caviar_param_count(form), caviar_start_config(form, cfg),
      caviar_box(form));

  CaviarFit fit;
  fit.form = form;
  fit.alpha = alpha;
  fit.params = CaviarParams{res.x};
  fit.q_init = q_init;
  fit.path = caviar_filter(form, fit.params, r, q_init);
  fit.forecast = caviar_step(form, fit.params, r.back(), fit.path.back());
  fit.loss = res.value;
  fit.diagnostics = res.diagnostics;
  return fit;
}

CaviarGridFit fit_caviar_grid(const ReturnSeries& returns, const QuantileGrid& grid,
                              CaviarForm form, const MultiStartConfig& cfg) {
  const std::size_t g = grid.size();
  if (g == 0) throw std::domain_error("fit_caviar_grid: empty grid");
  if (grid.target_index >= g)
    throw std::domain_error("fit_caviar_grid: target index out of range");
  for (std::size_t i = 0; i < g; ++i) {
    if (!(grid.levels[i] > 0.0) || !(grid.levels[i] < 1.0))
      throw std::domain_error("fit_caviar_grid: levels must lie in (0,1)");
    if (i > 0 && !(grid.levels[i] > grid.levels[i - 1]))
      throw std::domain_error("fit_caviar_grid: levels must be strictly increasing");
  }
  if (g > 2) {
    const double eta = grid.levels[1] - grid.levels[0];
    for (std::size_t i = 2; i < g; ++i)
      if (std::fabs(grid.levels[i] - grid.levels[i - 1] - eta) > 1e-9)
        throw std::domain_error("fit_caviar_grid: levels must be equally spaced");
  }

  CaviarGridFit out;
  out.level_fits.resize(g);
  parallel_for(g, cfg.workers, [&](std::size_t i) {
    MultiStartConfig level_cfg = cfg;
    level_cfg.rng_seed = derive_seed(cfg.rng_seed, i);
    level_cfg.workers = 1;  // parallelism lives at the level axis here
    out.level_fits[i] = fit_caviar(returns, grid.levels[i], form, level_cfg);
  });

  const std::size_t n = returns.size();
  out.matrix.grid = grid;
  out.matrix.n_rows = n;
  out.matrix.values.resize(n * g);
  std::vector<double> row(g);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < g; ++i) row[i] = out.level_fits[i].path[t];
    row = rearrange(std::move(row));
    for (std::size_t i = 0; i < g; ++i) out.matrix.values[t * g + i] = row[i];
  }
  for (std::size_t i = 0; i < g; ++i) row[i] = out.level_fits[i].forecast;
  out.matrix.forecasts = rearrange(std::move(row));
  return out;
}

}  // namespace wqes
