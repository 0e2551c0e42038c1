#include "wqes/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wqes/parallel.hpp"

namespace wqes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

// Uniform double in [0,1) from the top 53 bits; stable across platforms.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct CountedObjective {
  const Objective& f;
  std::size_t evals = 0;
  double operator()(const std::vector<double>& x) {
    ++evals;
    return finite_or_inf(f(x));
  }
};

// Central-difference gradient with probe points clamped into the box.
std::vector<double> numeric_gradient(CountedObjective& f, const std::vector<double>& x,
                                     double fx, const BoxConstraints& box) {
  const std::size_t n = x.size();
  std::vector<double> g(n, 0.0);
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = std::max(1e-6, 1e-6 * std::fabs(x[i]));
    const double hi = std::min(x[i] + h, box.upper[i]);
    const double lo = std::max(x[i] - h, box.lower[i]);
    const double denom = hi - lo;
    if (!(denom > 0.0)) {
      g[i] = 0.0;
      continue;
    }
    probe[i] = hi;
    const double f_hi = (hi == x[i]) ? fx : f(probe);
    probe[i] = lo;
    const double f_lo = (lo == x[i]) ? fx : f(probe);
    probe[i] = x[i];
    g[i] = (f_hi - f_lo) / denom;
  }
  return g;
}

double projected_gradient_norm(const std::vector<double>& x, const std::vector<double>& g,
                               const BoxConstraints& box) {
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (x[i] <= box.lower[i] && gi > 0.0) gi = 0.0;
    if (x[i] >= box.upper[i] && gi < 0.0) gi = 0.0;
    norm = std::max(norm, std::fabs(gi));
  }
  return norm;
}

}  // namespace

BoxConstraints BoxConstraints::unbounded(std::size_t dim) {
  BoxConstraints box;
  box.lower.assign(dim, -kInf);
  box.upper.assign(dim, kInf);
  return box;
}

void BoxConstraints::project(std::vector<double>& x) const {
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::min(std::max(x[i], lower[i]), upper[i]);
}

bool BoxConstraints::contains(const std::vector<double>& x) const {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

MinimizeResult nelder_mead(const Objective& objective, std::vector<double> start,
                           const BoxConstraints& box, const LocalOptions& opts) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start vector");
  if (box.dim() != n) throw std::invalid_argument("nelder_mead: box dimension mismatch");

  CountedObjective f{objective};
  box.project(start);

  // Initial simplex: start plus one perturbed vertex per coordinate.
  std::vector<std::vector<double>> verts(n + 1, start);
  std::vector<double> fvals(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = verts[i + 1];
    const double step = (v[i] != 0.0) ? 0.05 * std::fabs(v[i]) : 0.00025;
    v[i] += step;
    box.project(v);
    if (v[i] == start[i]) {  // boundary collapsed the step; go the other way
      v[i] = start[i] - step;
      box.project(v);
    }
  }
  for (std::size_t i = 0; i <= n; ++i) fvals[i] = f(verts[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
  };

  MinimizeResult result;
  std::size_t iter = 0;
  const std::size_t max_iter = std::max<std::size_t>(opts.max_iterations, 50 * n);
  for (; iter < max_iter; ++iter) {
    sort_order();
    const std::size_t best = order[0], worst = order[n];
    const double f_best = fvals[best], f_worst = fvals[worst];
    const double f_second = fvals[order[n - 1]];

    // Convergence on both value spread and vertex spread.
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      spread = std::max(spread, std::fabs(verts[worst][i] - verts[best][i]));
    if (std::isfinite(f_best) &&
        f_worst - f_best <= 1e-10 * (1.0 + std::fabs(f_best)) &&
        spread <= 1e-9 * (1.0 + std::fabs(verts[best][0]))) {
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += verts[k][i];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i)
        x[i] = centroid[i] + coef * (centroid[i] - verts[worst][i]);
      box.project(x);
      return x;
    };

    std::vector<double> xr = blend(1.0);
    const double fr = f(xr);
    if (fr < f_best) {
      std::vector<double> xe = blend(2.0);
      const double fe = f(xe);
      if (fe < fr) {
        verts[worst] = std::move(xe);
        fvals[worst] = fe;
      } else {
        verts[worst] = std::move(xr);
        fvals[worst] = fr;
      }
      continue;
    }
    if (fr < f_second) {
      verts[worst] = std::move(xr);
      fvals[worst] = fr;
      continue;
    }
    // Contraction (outside when the reflection improved on the worst vertex).
    const bool outside = fr < f_worst;
    std::vector<double> xc = blend(outside ? 0.5 : -0.5);
    const double fc = f(xc);
    if ((outside && fc <= fr) || (!outside && fc < f_worst)) {
      verts[worst] = std::move(xc);
      fvals[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < n; ++i)
        verts[k][i] = verts[best][i] + 0.5 * (verts[k][i] - verts[best][i]);
      box.project(verts[k]);
      fvals[k] = f(verts[k]);
    }
  }

  sort_order();
  result.x = verts[order[0]];
  result.value = fvals[order[0]];
  result.diagnostics.n_evaluations = f.evals;
  result.diagnostics.simplex_iterations = iter;
  result.diagnostics.converged = iter < max_iter;
  return result;
}

MinimizeResult minimize_local(const Objective& objective, std::vector<double> start,
                              const BoxConstraints& box, const LocalOptions& opts) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("minimize_local: empty start vector");
  if (box.dim() != n) throw std::invalid_argument("minimize_local: box dimension mismatch");

  CountedObjective f{objective};
  box.project(start);
  double fx = f(start);
  if (!std::isfinite(fx))
    throw std::domain_error("minimize_local: objective not finite at start");

  std::vector<double> x = std::move(start);
  std::vector<double> g = numeric_gradient(f, x, fx, box);

  // Inverse Hessian approximation, identity at first.
  std::vector<double> H(n * n, 0.0);
  auto reset_h = [&] {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
  };
  reset_h();

  MinimizeResult result;
  std::size_t iter = 0;
  bool converged = false;
  for (; iter < opts.max_iterations; ++iter) {
    if (projected_gradient_norm(x, g, box) <= opts.gradient_tolerance) {
      converged = true;
      break;
    }

    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i] -= H[i * n + j] * g[j];
    double gd = std::inner_product(g.begin(), g.end(), d.begin(), 0.0);
    if (!(gd < 0.0)) {  // not a descent direction; restart from steepest descent
      reset_h();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      gd = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
      if (!(gd < 0.0)) break;
    }

    // Backtracking Armijo search on the projected step.
    double t = 1.0;
    std::vector<double> x_new;
    double f_new = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x;
      for (std::size_t i = 0; i < n; ++i) x_new[i] += t * d[i];
      box.project(x_new);
      double step_gd = 0.0;
      for (std::size_t i = 0; i < n; ++i) step_gd += g[i] * (x_new[i] - x[i]);
      f_new = f(x_new);
      if (step_gd < 0.0 && f_new <= fx + 1e-4 * step_gd) {
        accepted = true;
        break;
      }
      t *= 0.5;
      if (t < 1e-14) break;
    }
    if (!accepted) break;  // no further sufficient decrease along this direction

    std::vector<double> g_new = numeric_gradient(f, x_new, f_new, box);
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
    double s_norm = 0.0, y_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s_norm += s[i] * s[i];
      y_norm += y[i] * y[i];
    }
    if (sy > 1e-12 * std::sqrt(s_norm * y_norm)) {
      // H <- (I - r s y^T) H (I - r y s^T) + r s s^T with r = 1/sy
      const double r = 1.0 / sy;
      std::vector<double> Hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
      const double yHy = std::inner_product(y.begin(), y.end(), Hy.begin(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          H[i * n + j] += -r * (s[i] * Hy[j] + Hy[i] * s[j]) +
                          r * (1.0 + r * yHy) * s[i] * s[j];
        }
      }
    } else {
      reset_h();
    }
    x = std::move(x_new);
    fx = f_new;
    g = std::move(g_new);
  }

  result.x = std::move(x);
  result.value = fx;
  result.diagnostics.n_evaluations = f.evals;
  result.diagnostics.quasi_newton_iterations = iter;
  result.diagnostics.gradient_norm = projected_gradient_norm(result.x, g, box);
  result.diagnostics.converged = converged;
  return result;
}

MinimizeResult minimize_multistart(const Objective& objective, std::size_t dim,
                                   const MultiStartConfig& cfg,
                                   const BoxConstraints& box) {
  if (dim == 0) throw std::invalid_argument("minimize_multistart: dim must be positive");
  if (box.dim() != dim)
    throw std::invalid_argument("minimize_multistart: box dimension mismatch");
  if (cfg.n_candidates == 0 || cfg.n_refine == 0 || cfg.n_refine > cfg.n_candidates)
    throw std::invalid_argument(
        "minimize_multistart: need 1 <= n_refine <= n_candidates");
  if (!cfg.candidate_intervals.empty() && cfg.candidate_intervals.size() != dim)
    throw std::invalid_argument(
        "minimize_multistart: candidate_intervals size must match dim");

  // Stage 1: sequential candidate generation (seeded), parallel evaluation.
  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<std::vector<double>> candidates(cfg.n_candidates,
                                              std::vector<double>(dim));
  for (auto& cand : candidates) {
    for (std::size_t d = 0; d < dim; ++d) {
      double lo = 0.0, hi = 1.0;
      if (!cfg.candidate_intervals.empty()) {
        lo = cfg.candidate_intervals[d].first;
        hi = cfg.candidate_intervals[d].second;
      }
      cand[d] = lo + uniform01(rng) * (hi - lo);
    }
    box.project(cand);
  }

  std::vector<double> values(cfg.n_candidates, kInf);
  parallel_for(cfg.n_candidates, cfg.workers,
               [&](std::size_t i) { values[i] = finite_or_inf(objective(candidates[i])); });

  OptimDiagnostics diag;
  diag.n_evaluations = cfg.n_candidates;
  for (double v : values)
    if (std::isfinite(v)) ++diag.n_finite_candidates;

  if (diag.n_finite_candidates == 0)
    throw OptimizationError("minimize_multistart: objective non-finite at every candidate",
                            diag);

  std::vector<std::size_t> order(cfg.n_candidates);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  diag.best_candidate_value = values[order[0]];

  // Stage 2: simplex descent then quasi-Newton polish from the best starts.
  const std::size_t n_refine =
      std::min<std::size_t>(cfg.n_refine, diag.n_finite_candidates);
  LocalOptions local{cfg.max_iterations, cfg.gradient_tolerance};

  MinimizeResult best;
  for (std::size_t k = 0; k < n_refine; ++k) {
    const std::size_t idx = order[k];
    MinimizeResult nm = nelder_mead(objective, candidates[idx], box, local);
    diag.n_evaluations += nm.diagnostics.n_evaluations;
    diag.simplex_iterations += nm.diagnostics.simplex_iterations;
    MinimizeResult qn = nm;
    if (std::isfinite(nm.value)) {
      qn = minimize_local(objective, nm.x, box, local);
      diag.n_evaluations += qn.diagnostics.n_evaluations;
      diag.quasi_newton_iterations += qn.diagnostics.quasi_newton_iterations;
    }
    MinimizeResult& stage_best = qn.value <= nm.value ? qn : nm;
    if (stage_best.value < best.value) {
      best.x = stage_best.x;
      best.value = stage_best.value;
      diag.gradient_norm = qn.diagnostics.gradient_norm;
      diag.converged = qn.diagnostics.converged;
    }
  }
  // Polish never loses to the raw candidate; keep the invariant explicit.
  if (best.value > diag.best_candidate_value) {
    best.x = candidates[order[0]];
    best.value = diag.best_candidate_value;
  }
  best.diagnostics = diag;
  return best;
}

}  // namespace wqes
