#include "wqes/wq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace wqes {

namespace {

constexpr double kEsPenalty = 1e10;  // returned when the composed ES is not < 0
constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string variant_name(EsVariantTag tag) {
  switch (tag) {
    case EsVariantTag::WqBeta: return "WQ-Beta";
    case EsVariantTag::WqEw: return "WQ-EW";
    case EsVariantTag::WqUnc: return "WQ-UNC";
    case EsVariantTag::SaBc: return "SA-BC";
    case EsVariantTag::SaNoBc: return "SA-No-BC";
  }
  return "?";
}

QuantileGrid build_grid(double alpha, double alpha1, int m, EsVariantTag tag) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("build_grid: alpha must lie in (0,1)");
  if (!(alpha1 > 0.0) || !(alpha1 < alpha))
    throw std::domain_error("build_grid: need 0 < alpha1 < alpha");
  if (m < 2) throw std::domain_error("build_grid: need M >= 2");

  const double eta = (alpha - alpha1) / static_cast<double>(m - 1);
  QuantileGrid grid;
  grid.levels.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    grid.levels[static_cast<std::size_t>(i)] = alpha1 + eta * i;
  grid.levels[static_cast<std::size_t>(m - 1)] = alpha;  // exact target level
  if (tag == EsVariantTag::WqBeta) grid.levels.push_back(alpha + eta);
  grid.target_index = static_cast<std::size_t>(m - 1);
  return grid;
}

std::vector<double> weights_from_beta(const BetaWeightParams& p, std::size_t g) {
  if (g < 2) throw std::domain_error("weights_from_beta: need at least 2 grid points");
  std::vector<double> w(g);
  for (std::size_t i = 1; i <= g; ++i)
    w[i - 1] = beta_weight(static_cast<double>(i) / static_cast<double>(g), p);
  return w;
}

double es_estimate(const EsWeightFit& fit, std::span<const double> q_row) {
  if (q_row.size() != fit.derived_weights.size())
    throw std::domain_error("es_estimate: row length does not match weights");
  double es = fit.w0;
  for (std::size_t i = 0; i < q_row.size(); ++i)
    es += fit.derived_weights[i] * q_row[i];
  return es;
}

double al_joint_loss(double r, double q, double es, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("al_joint_loss: alpha must lie in (0,1)");
  if (!std::isfinite(r) || !std::isfinite(q) || !std::isfinite(es))
    throw std::domain_error("al_joint_loss: non-finite argument");
  if (!(es < 0.0))
    throw std::domain_error("al_joint_loss: score undefined unless es < 0");
  const double ind = r <= q ? 1.0 : 0.0;
  return -std::log((alpha - 1.0) / es) - (r - q) * (alpha - ind) / (alpha * es);
}

namespace {

// Second-stage search: deterministic starts plus 100 random restarts sampled
// from per-parameter intervals, then simplex + quasi-Newton polish of the two
// best. The result never exceeds the objective at any start.
MinimizeResult stage2_minimize(const Objective& objective,
                               std::vector<std::vector<double>> starts,
                               const std::vector<std::pair<double, double>>& sampling,
                               const BoxConstraints& box, const MultiStartConfig& cfg) {
  constexpr std::size_t kRandomRestarts = 100;
  const std::size_t dim = sampling.size();

  std::mt19937_64 rng(cfg.rng_seed);
  for (std::size_t k = 0; k < kRandomRestarts; ++k) {
    std::vector<double> cand(dim);
    for (std::size_t d = 0; d < dim; ++d)
      cand[d] = sampling[d].first +
                uniform01(rng) * (sampling[d].second - sampling[d].first);
    starts.push_back(std::move(cand));
  }
  for (auto& s : starts) box.project(s);

  std::vector<double> values(starts.size(), kInf);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const double v = objective(starts[i]);
    values[i] = std::isfinite(v) ? v : kInf;
  }

  OptimDiagnostics diag;
  diag.n_evaluations = starts.size();
  std::vector<std::size_t> order(starts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  diag.best_candidate_value = values[order[0]];
  for (double v : values)
    if (std::isfinite(v)) ++diag.n_finite_candidates;

  if (!(diag.best_candidate_value < kEsPenalty))
    throw OptimizationError(
        "fit_es_weights: no candidate produced a negative ES path", diag);

  const LocalOptions local{cfg.max_iterations, cfg.gradient_tolerance};
  MinimizeResult best;
  const std::size_t n_refine = std::min<std::size_t>(cfg.n_refine, starts.size());
  for (std::size_t k = 0; k < n_refine; ++k) {
    MinimizeResult nm = nelder_mead(objective, starts[order[k]], box, local);
    diag.n_evaluations += nm.diagnostics.n_evaluations;
    diag.simplex_iterations += nm.diagnostics.simplex_iterations;
    MinimizeResult qn = nm;
    if (std::isfinite(nm.value)) {
      qn = minimize_local(objective, nm.x, box, local);
      diag.n_evaluations += qn.diagnostics.n_evaluations;
      diag.quasi_newton_iterations += qn.diagnostics.quasi_newton_iterations;
    }
    const MinimizeResult& better = qn.value <= nm.value ? qn : nm;
    if (better.value < best.value) {
      best.x = better.x;
      best.value = better.value;
      diag.gradient_norm = qn.diagnostics.gradient_norm;
      diag.converged = qn.diagnostics.converged;
    }
  }
  if (best.value > diag.best_candidate_value) {
    best.x = starts[order[0]];
    best.value = diag.best_candidate_value;
  }
  best.diagnostics = diag;
  return best;
}

struct Stage2Data {
  std::vector<double> a_term;  // (r_t - q_t)(alpha - I(r_t <= q_t)) / alpha
  std::vector<double> qcols;   // row-major N x G, variant columns only
  std::size_t n = 0;
  std::size_t g = 0;
  double log_one_minus_alpha = 0.0;
};

// Aggregate AL loss of the composed ES path; kEsPenalty when any es_t >= 0.
double stage2_loss(const Stage2Data& d, double w0, std::span<const double> w) {
  double loss = 0.0;
  for (std::size_t t = 0; t < d.n; ++t) {
    double es = w0;
    const double* row = d.qcols.data() + t * d.g;
    for (std::size_t i = 0; i < d.g; ++i) es += w[i] * row[i];
    if (!(es < 0.0) || !std::isfinite(es)) return kEsPenalty;
    loss += std::log(-es) - d.a_term[t] / es;
  }
  loss -= static_cast<double>(d.n) * d.log_one_minus_alpha;
  return std::isfinite(loss) ? loss : kEsPenalty;
}

}  // namespace

EsWeightFit fit_es_weights(const ReturnSeries& returns, const QuantileMatrix& qm,
                           const EsVariant& variant, const MultiStartConfig& cfg) {
  if (returns.size() != qm.n_rows)
    throw std::domain_error("fit_es_weights: returns and matrix length mismatch");
  const double alpha = qm.grid.target();
  const QuantileGrid vgrid = build_grid(alpha, variant.alpha1, variant.m, variant.tag);

  // Locate the variant levels inside the source grid.
  std::vector<std::size_t> columns(vgrid.size());
  for (std::size_t i = 0; i < vgrid.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < qm.grid.size(); ++j) {
      if (std::fabs(vgrid.levels[i] - qm.grid.levels[j]) <= 1e-9) {
        columns[i] = j;
        found = true;
        break;
      }
    }
    if (!found)
      throw std::domain_error("fit_es_weights: variant grid does not match matrix grid");
  }

  const std::size_t m = static_cast<std::size_t>(variant.m);
  Stage2Data data;
  data.n = qm.n_rows;
  data.g = vgrid.size();
  data.log_one_minus_alpha = std::log(1.0 - alpha);
  data.a_term.resize(data.n);
  data.qcols.resize(data.n * data.g);
  for (std::size_t t = 0; t < data.n; ++t) {
    const double r = returns.values[t];
    const double q = qm.at(t, qm.grid.target_index);
    const double ind = r <= q ? 1.0 : 0.0;
    data.a_term[t] = (r - q) * (alpha - ind) / alpha;
    for (std::size_t i = 0; i < data.g; ++i)
      data.qcols[t * data.g + i] = qm.at(t, columns[i]);
  }

  EsWeightFit fit;
  fit.tag = variant.tag;
  fit.grid = vgrid;
  fit.columns = columns;

  const double equal_w = 1.0 / static_cast<double>(m);
  const auto sa_weights = std::vector<double>(m, equal_w);

  // SA-BC's one-parameter fit; reused to seed the richer variants so the
  // nesting inequalities hold by construction.
  const auto fit_sa_bc_w0 = [&]() {
    const Objective obj = [&](const std::vector<double>& th) {
      return stage2_loss(data, th[0], sa_weights);
    };
    return stage2_minimize(obj, {{0.0}}, {{-0.5, 0.5}},
                           BoxConstraints::unbounded(1), cfg);
  };

  switch (variant.tag) {
    case EsVariantTag::SaNoBc: {
      fit.w0 = 0.0;
      fit.derived_weights = sa_weights;
      fit.loss = stage2_loss(data, 0.0, sa_weights);
      break;
    }
    case EsVariantTag::SaBc: {
      const MinimizeResult res = fit_sa_bc_w0();
      fit.w0 = res.x[0];
      fit.derived_weights = sa_weights;
      fit.loss = res.value;
      fit.diagnostics = res.diagnostics;
      break;
    }
    case EsVariantTag::WqEw: {
      const MinimizeResult sa = fit_sa_bc_w0();
      const Objective obj = [&](const std::vector<double>& th) {
        const std::vector<double> w(m, th[1]);
        return stage2_loss(data, th[0], w);
      };
      const MinimizeResult res = stage2_minimize(
          obj, {{0.0, equal_w}, {sa.x[0], equal_w}},
          {{-0.5, 0.5}, {0.0, 2.0 * equal_w}}, BoxConstraints::unbounded(2), cfg);
      // res.value <= sa.value: the SA-BC optimum is one of the starts.
      fit.w0 = res.x[0];
      fit.w_scalar = res.x[1];
      fit.derived_weights.assign(m, res.x[1]);
      fit.loss = res.value;
      fit.diagnostics = res.diagnostics;
      break;
    }
    case EsVariantTag::WqBeta: {
      const Objective obj = [&](const std::vector<double>& th) {
        const std::vector<double> w =
            weights_from_beta({th[1], th[2]}, data.g);
        return stage2_loss(data, th[0], w);
      };
      BoxConstraints box;
      box.lower = {-50.0, 1e-3, 1e-3};
      box.upper = {50.0, 60.0, 60.0};
      const MinimizeResult res = stage2_minimize(
          obj, {{0.0, 1.0, 2.0}},
          {{-0.5, 0.5}, {0.2, 4.0}, {0.5, 6.0}}, box, cfg);
      fit.w0 = res.x[0];
      fit.beta_params = BetaWeightParams{res.x[1], res.x[2]};
      fit.derived_weights = weights_from_beta(*fit.beta_params, data.g);
      fit.loss = res.value;
      fit.diagnostics = res.diagnostics;
      break;
    }
    case EsVariantTag::WqUnc: {
      const MinimizeResult sa = fit_sa_bc_w0();
      const Objective obj = [&](const std::vector<double>& th) {
        std::vector<double> w(m);
        for (std::size_t i = 0; i < m; ++i) w[i] = th[i + 1] * th[i + 1];
        return stage2_loss(data, th[0], w);
      };
      const double v0 = std::sqrt(equal_w);
      std::vector<double> start_flat(m + 1, v0);
      start_flat[0] = 0.0;
      std::vector<double> start_sa = start_flat;
      start_sa[0] = sa.x[0];
      std::vector<std::pair<double, double>> sampling(m + 1, {0.0, 2.0 * v0});
      sampling[0] = {-0.5, 0.5};
      const MinimizeResult res =
          stage2_minimize(obj, {start_flat, start_sa}, sampling,
                          BoxConstraints::unbounded(m + 1), cfg);
      fit.w0 = res.x[0];
      std::vector<double> w(m);
      for (std::size_t i = 0; i < m; ++i) w[i] = res.x[i + 1] * res.x[i + 1];
      fit.w_vector = w;
      fit.derived_weights = w;
      fit.loss = res.value;
      fit.diagnostics = res.diagnostics;
      break;
    }
  }

  fit.theta = std::accumulate(fit.derived_weights.begin(),
                              fit.derived_weights.end(), 0.0);
  return fit;
}

EsForecast forecast_es(const EsWeightFit& fit, std::span<const double> q_forecast_row) {
  if (q_forecast_row.size() != fit.derived_weights.size())
    throw std::domain_error("forecast_es: row length does not match weights");
  EsForecast out;
  out.components.resize(q_forecast_row.size());
  double es = fit.w0;
  for (std::size_t i = 0; i < q_forecast_row.size(); ++i) {
    out.components[i] = fit.derived_weights[i] * q_forecast_row[i];
    es += out.components[i];
  }
  out.var = q_forecast_row[fit.grid.target_index];
  out.es = es;
  if (out.es > out.var) {
    out.es = out.var;
    out.clamped = true;
  }
  return out;
}

EsForecast forecast_es(const EsWeightFit& fit, const QuantileMatrix& qm) {
  std::vector<double> row(fit.columns.size());
  for (std::size_t i = 0; i < fit.columns.size(); ++i)
    row[i] = qm.forecasts.at(fit.columns[i]);
  return forecast_es(fit, row);
}

}  // namespace wqes
