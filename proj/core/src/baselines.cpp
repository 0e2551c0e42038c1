#include "wqes/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wqes/parallel.hpp"

namespace wqes {

namespace {

constexpr double kPenalty = 1e10;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

double init_quantile(const ReturnSeries& returns, double alpha) {
  const std::size_t n0 = std::min<std::size_t>(returns.size(), 100);
  return empirical_quantile({returns.values.data(), n0}, alpha);
}

double init_gap(const ReturnSeries& returns, double alpha) {
  const std::size_t n0 = std::min<std::size_t>(returns.size(), 100);
  std::span<const double> head{returns.values.data(), n0};
  const double gap = empirical_quantile(head, alpha) - empirical_tail_mean(head, alpha);
  return std::max(gap, 0.0);
}

// AL joint loss of a (VaR, ES) path pair; kPenalty when any es_t >= 0.
double joint_path_loss(std::span<const double> r, std::span<const double> q,
                       std::span<const double> es, double alpha) {
  double loss = 0.0;
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (!(es[t] < 0.0) || !std::isfinite(es[t]) || !std::isfinite(q[t]))
      return kPenalty;
    const double ind = r[t] <= q[t] ? 1.0 : 0.0;
    loss += std::log(-es[t]) - (r[t] - q[t]) * (alpha - ind) / (alpha * es[t]);
  }
  loss -= static_cast<double>(r.size()) * std::log(1.0 - alpha);
  return std::isfinite(loss) ? loss : kPenalty;
}

void es_caviar_filter(CaviarForm quantile_form, EsCaviarForm es_form,
                      const std::vector<double>& beta,
                      const std::vector<double>& gamma,
                      std::span<const double> r, double q_init, double x_init,
                      std::vector<double>& q_path, std::vector<double>& es_path) {
  const CaviarParams qp{beta};
  q_path = caviar_filter(quantile_form, qp, r, q_init);
  const std::size_t n = r.size();
  es_path.resize(n);
  if (es_form == EsCaviarForm::Mult) {
    const double mult = 1.0 + std::exp(gamma[0]);
    for (std::size_t t = 0; t < n; ++t) es_path[t] = mult * q_path[t];
    return;
  }
  double x = x_init;
  es_path[0] = q_path[0] - x;
  for (std::size_t t = 1; t < n; ++t) {
    if (r[t - 1] <= q_path[t - 1])
      x = gamma[0] + gamma[1] * (q_path[t - 1] - r[t - 1]) + gamma[2] * x;
    es_path[t] = q_path[t] - x;
  }
}

// Empirical tau-expectile by fixed-point iteration of the first-order
// condition of the asymmetric least squares criterion.
double empirical_expectile(std::span<const double> xs, double tau) {
  double mu = 0.0;
  for (double x : xs) mu += x;
  mu /= static_cast<double>(xs.size());
  for (int it = 0; it < 200; ++it) {
    double num = 0.0, den = 0.0;
    for (double x : xs) {
      const double w = std::fabs(tau - (x < mu ? 1.0 : 0.0));
      num += w * x;
      den += w;
    }
    const double next = num / den;
    if (std::fabs(next - mu) < 1e-12 * (1.0 + std::fabs(mu))) return next;
    mu = next;
  }
  return mu;
}

std::vector<double> expectile_filter(const std::vector<double>& beta,
                                     std::span<const double> r, double mu_init) {
  std::vector<double> mu(r.size());
  mu[0] = mu_init;
  for (std::size_t t = 1; t < r.size(); ++t)
    mu[t] = beta[0] + beta[1] * std::fabs(r[t - 1]) + beta[2] * mu[t - 1];
  return mu;
}

double als_loss(std::span<const double> r, std::span<const double> mu, double tau) {
  double loss = 0.0;
  for (std::size_t t = 0; t < r.size(); ++t) {
    const double d = r[t] - mu[t];
    loss += std::fabs(tau - (r[t] < mu[t] ? 1.0 : 0.0)) * d * d;
  }
  return std::isfinite(loss) ? loss : kInf;
}

double sample_variance(std::span<const double> r) {
  double mean = 0.0;
  for (double x : r) mean += x;
  mean /= static_cast<double>(r.size());
  double var = 0.0;
  for (double x : r) var += (x - mean) * (x - mean);
  return var / static_cast<double>(r.size());
}

std::vector<double> garch_variance_filter(double omega, double gamma, double delta,
                                          std::span<const double> r, double s2_init) {
  std::vector<double> s2(r.size());
  s2[0] = s2_init;
  for (std::size_t t = 1; t < r.size(); ++t)
    s2[t] = omega + gamma * r[t - 1] * r[t - 1] + delta * s2[t - 1];
  return s2;
}

}  // namespace

EsCaviarFit fit_es_caviar(const ReturnSeries& returns, double alpha,
                          EsCaviarForm es_form, CaviarForm quantile_form,
                          const MultiStartConfig& cfg) {
  if (returns.size() < 250)
    throw std::domain_error("fit_es_caviar: need at least 250 observations");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("fit_es_caviar: alpha must lie in (0,1)");

  const std::size_t nb = caviar_param_count(quantile_form);
  const std::size_t ng = es_form == EsCaviarForm::Add ? 3 : 1;
  const std::size_t dim = nb + ng;
  const double q_init = init_quantile(returns, alpha);
  const double x_init = es_form == EsCaviarForm::Add ? init_gap(returns, alpha) : 0.0;
  std::span<const double> r{returns.values};

  const Objective objective = [&](const std::vector<double>& theta) {
    const std::vector<double> beta(theta.begin(), theta.begin() + nb);
    const std::vector<double> gamma(theta.begin() + nb, theta.end());
    std::vector<double> q_path, es_path;
    es_caviar_filter(quantile_form, es_form, beta, gamma, r, q_init, x_init,
                     q_path, es_path);
    return joint_path_loss(r, q_path, es_path, alpha);
  };

  MultiStartConfig ms = cfg;
  // The one-parameter multiplicative ES component needs far fewer starts.
  if (es_form == EsCaviarForm::Mult)
    ms.n_candidates = std::min<std::size_t>(cfg.n_candidates, 1000);
  ms.candidate_intervals.assign(dim, {-1.0, 1.0});
  ms.candidate_intervals[nb - 1] = {0.0, 1.0};  // AR coefficient
  BoxConstraints box;
  box.lower.assign(dim, -10.0);
  box.upper.assign(dim, 10.0);
  box.lower[nb - 1] = -0.999;
  box.upper[nb - 1] = 0.999;
  if (es_form == EsCaviarForm::Add) {
    for (std::size_t k = 0; k < 3; ++k) {
      ms.candidate_intervals[nb + k] = {0.0, k == 2 ? 1.0 : 0.5};
      box.lower[nb + k] = 0.0;
    }
    box.upper[nb + 2] = 0.999;  // gap recursion stays stable
  } else {
    ms.candidate_intervals[nb] = {-3.0, 0.0};
    box.lower[nb] = -20.0;
    box.upper[nb] = 5.0;
  }

  const MinimizeResult res = minimize_multistart(objective, dim, ms, box);
  if (!(res.value < kPenalty))
    throw OptimizationError("fit_es_caviar: no feasible ES path found",
                            res.diagnostics);

  EsCaviarFit fit;
  fit.es_form = es_form;
  fit.quantile_form = quantile_form;
  fit.alpha = alpha;
  fit.beta.assign(res.x.begin(), res.x.begin() + nb);
  fit.gamma.assign(res.x.begin() + nb, res.x.end());
  fit.q_init = q_init;
  fit.x_init = x_init;
  es_caviar_filter(quantile_form, es_form, fit.beta, fit.gamma, r, q_init, x_init,
                   fit.var_path, fit.es_path);
  fit.loss = res.value;
  fit.diagnostics = res.diagnostics;
  const VarEs fc = es_caviar_forecast(fit, returns);
  fit.var_forecast = fc.var;
  fit.es_forecast = fc.es;
  return fit;
}

VarEs es_caviar_forecast(const EsCaviarFit& fit, const ReturnSeries& window) {
  if (window.empty()) throw std::domain_error("es_caviar_forecast: empty window");
  std::span<const double> r{window.values};
  // Initial states are re-derived from the window; parameters stay fixed.
  const double q0 = init_quantile(window, fit.alpha);
  const double x0 =
      fit.es_form == EsCaviarForm::Add ? init_gap(window, fit.alpha) : 0.0;
  std::vector<double> q_path, es_path;
  es_caviar_filter(fit.quantile_form, fit.es_form, fit.beta, fit.gamma, r, q0, x0,
                   q_path, es_path);
  VarEs out;
  const CaviarParams qp{fit.beta};
  out.var = caviar_step(fit.quantile_form, qp, r.back(), q_path.back());
  if (fit.es_form == EsCaviarForm::Mult) {
    out.es = (1.0 + std::exp(fit.gamma[0])) * out.var;
    return out;
  }
  double x = q_path.back() - es_path.back();
  if (r.back() <= q_path.back())
    x = fit.gamma[0] + fit.gamma[1] * (q_path.back() - r.back()) + fit.gamma[2] * x;
  out.es = out.var - x;
  return out;
}

CareFit fit_care_sav(const ReturnSeries& returns, double alpha, int grid_size,
                     const MultiStartConfig& cfg) {
  if (returns.size() < 250)
    throw std::domain_error("fit_care_sav: need at least 250 observations");
  if (grid_size < 1) throw std::domain_error("fit_care_sav: empty expectile grid");
  if (!(alpha > 0.0) || !(alpha < 0.5))
    throw std::domain_error("fit_care_sav: alpha must lie in (0,0.5)");

  std::span<const double> r{returns.values};
  const std::size_t n = r.size();
  const std::size_t n0 = std::min<std::size_t>(n, 100);

  MultiStartConfig ms = cfg;
  ms.candidate_intervals = {{-1.0, 1.0}, {-1.0, 1.0}, {0.0, 1.0}};
  BoxConstraints box;
  box.lower = {-10.0, -10.0, -0.999};
  box.upper = {10.0, 10.0, 0.999};

  CareFit best;
  double best_vrate_gap = kInf;
  double best_qloss = kInf;
  std::vector<double> prev_x;

  for (int j = 1; j <= grid_size; ++j) {
    const double tau = alpha * static_cast<double>(j) / static_cast<double>(grid_size);
    const double mu_init = empirical_expectile({r.data(), n0}, tau);
    const Objective objective = [&, tau, mu_init](const std::vector<double>& th) {
      const std::vector<double> mu = expectile_filter(th, r, mu_init);
      return als_loss(r, mu, tau);
    };

    MultiStartConfig level_cfg = ms;
    level_cfg.rng_seed = derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(j));
    // Neighbouring expectile levels have close optima; after the first level
    // a smaller candidate pool plus a warm start is enough.
    if (j > 1)
      level_cfg.n_candidates = std::max<std::size_t>(cfg.n_candidates / 5, 200);
    MinimizeResult res = minimize_multistart(objective, 3, level_cfg, box);
    if (!prev_x.empty()) {
      const MinimizeResult warm = minimize_local(
          objective, prev_x, box, {cfg.max_iterations, cfg.gradient_tolerance});
      if (warm.value < res.value) res = warm;
    }
    prev_x = res.x;

    const std::vector<double> mu = expectile_filter(res.x, r, mu_init);
    std::size_t violations = 0;
    for (std::size_t t = 0; t < n; ++t)
      if (r[t] < mu[t]) ++violations;
    const double vrate = static_cast<double>(violations) / static_cast<double>(n);
    const double vrate_gap = std::fabs(vrate - alpha);
    const double qloss = quantile_loss(r, mu, alpha);

    const bool better = vrate_gap < best_vrate_gap - 1e-15 ||
                        (std::fabs(vrate_gap - best_vrate_gap) <= 1e-15 &&
                         qloss < best_qloss);
    if (j == 1 || better) {
      best_vrate_gap = vrate_gap;
      best_qloss = qloss;
      best.tau = tau;
      best.beta = res.x;
      best.mu_init = mu_init;
      best.var_path = mu;
      best.violation_rate = vrate;
      best.als_loss = res.value;
    }
  }

  best.scale = 1.0 + best.tau / ((1.0 - 2.0 * best.tau) * alpha);
  best.es_path.resize(n);
  best.crossing_flags = 0;
  for (std::size_t t = 0; t < n; ++t) {
    best.es_path[t] = best.scale * best.var_path[t];
    if (best.es_path[t] > best.var_path[t]) ++best.crossing_flags;
  }
  const VarEs fc = care_forecast(best, returns, alpha);
  best.var_forecast = fc.var;
  best.es_forecast = fc.es;
  return best;
}

VarEs care_forecast(const CareFit& fit, const ReturnSeries& window, double /*alpha*/) {
  if (window.empty()) throw std::domain_error("care_forecast: empty window");
  std::span<const double> r{window.values};
  const std::size_t n0 = std::min<std::size_t>(r.size(), 100);
  const double mu_init = empirical_expectile({r.data(), n0}, fit.tau);
  const std::vector<double> mu = expectile_filter(fit.beta, r, mu_init);
  VarEs out;
  out.var = fit.beta[0] + fit.beta[1] * std::fabs(r.back()) + fit.beta[2] * mu.back();
  out.es = fit.scale * out.var;
  return out;
}

GarchTFit fit_garch_t(const ReturnSeries& returns, double alpha,
                      const MultiStartConfig& cfg) {
  if (returns.size() < 250)
    throw std::domain_error("fit_garch_t: need at least 250 observations");

  std::span<const double> r{returns.values};
  const std::size_t n = r.size();
  const double sample_var = sample_variance(r);
  if (!(sample_var > 0.0))
    throw std::domain_error("fit_garch_t: degenerate return series");

  // theta = (omega, gamma, delta, nu); sigma^2_1 targeted at sample variance.
  const Objective nll = [&](const std::vector<double>& th) {
    const double omega = th[0], g = th[1], d = th[2], nu = th[3];
    if (!(omega > 0.0) || g < 0.0 || d < 0.0 || g + d > 0.9999 || !(nu > 2.01))
      return kPenalty;
    const double s = std_t_scale(nu);
    const double log_c = log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) -
                         0.5 * std::log(nu * kPi) - std::log(s);
    const std::vector<double> s2 = garch_variance_filter(omega, g, d, r, sample_var);
    double ll = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = std::max(s2[t], 1e-12);
      const double z = r[t] / (std::sqrt(v) * s);
      ll += log_c - 0.5 * std::log(v) - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
    }
    return std::isfinite(ll) ? -ll : kPenalty;
  };

  MultiStartConfig ms = cfg;
  ms.candidate_intervals = {{1e-4 * sample_var, 0.2 * sample_var},
                            {0.0, 0.3},
                            {0.5, 0.98},
                            {4.0, 30.0}};
  BoxConstraints box;
  box.lower = {1e-8, 0.0, 0.0, 2.05};
  box.upper = {10.0 * sample_var, 0.9999, 0.9999, 300.0};

  const MinimizeResult res = minimize_multistart(nll, 4, ms, box);
  if (!(res.value < kPenalty))
    throw OptimizationError("fit_garch_t: likelihood maximization failed",
                            res.diagnostics);

  GarchTFit fit;
  fit.omega = res.x[0];
  fit.gamma = res.x[1];
  fit.delta = res.x[2];
  fit.nu = res.x[3];
  const std::vector<double> s2 =
      garch_variance_filter(fit.omega, fit.gamma, fit.delta, r, sample_var);
  fit.sigma.resize(n);
  for (std::size_t t = 0; t < n; ++t) fit.sigma[t] = std::sqrt(std::max(s2[t], 0.0));
  fit.neg_log_likelihood = res.value;
  fit.diagnostics = res.diagnostics;
  const VarEs fc = garch_t_forecast(fit, returns, alpha);
  fit.var_forecast = fc.var;
  fit.es_forecast = fc.es;
  fit.sigma_forecast = fc.var / student_t_var_es(1.0, alpha, {fit.nu}).var;
  return fit;
}

VarEs garch_t_forecast(const GarchTFit& fit, const ReturnSeries& window,
                       double alpha) {
  if (window.empty()) throw std::domain_error("garch_t_forecast: empty window");
  std::span<const double> r{window.values};
  const double s2_init = sample_variance(r);
  const std::vector<double> s2 =
      garch_variance_filter(fit.omega, fit.gamma, fit.delta, r, s2_init);
  const double s2_next =
      fit.omega + fit.gamma * r.back() * r.back() + fit.delta * s2.back();
  return student_t_var_es(std::sqrt(std::max(s2_next, 1e-12)), alpha, {fit.nu});
}

}  // namespace wqes
