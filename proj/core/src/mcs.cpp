#include "wqes/mcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace wqes {

namespace {

constexpr double kHugeT = 1e100;

// Studentization guard: zero-variance differentials get t = 0 when the mean
// differential is also zero (identical columns) and +-kHugeT otherwise
// (deterministic dominance).
double studentize(double dbar, double var, double scale) {
  const double tol = 1e-12 * (1.0 + scale);
  if (var > tol * tol) return dbar / std::sqrt(var);
  if (std::fabs(dbar) <= tol) return 0.0;
  return dbar > 0.0 ? kHugeT : -kHugeT;
}

}  // namespace

McsResult mcs(const LossMatrix& losses, const McsConfig& cfg) {
  const std::size_t k_all = losses.models.size();
  const std::size_t m = losses.n_steps;
  if (k_all == 0) throw std::domain_error("mcs: no models");
  if (!(cfg.level > 0.0) || !(cfg.level < 1.0))
    throw std::domain_error("mcs: confidence level must lie in (0,1)");

  McsResult result;
  result.models = losses.models;
  result.p_values.assign(k_all, 1.0);
  result.in_mcs.assign(k_all, true);
  if (k_all == 1) {
    result.survivors = losses.models;
    return result;
  }
  if (m < 50) throw std::domain_error("mcs: need at least 50 out-of-sample steps");
  if (losses.values.size() != m * k_all)
    throw std::domain_error("mcs: loss matrix shape mismatch");
  for (double v : losses.values)
    if (!std::isfinite(v)) throw std::domain_error("mcs: non-finite loss entry");

  std::size_t block = cfg.block_length;
  if (block == 0)
    block = static_cast<std::size_t>(
        std::ceil(std::cbrt(static_cast<double>(m))));
  block = std::min(std::max<std::size_t>(block, 1), m);
  const std::size_t n_boot = std::max<std::size_t>(cfg.n_boot, 1);

  // Full-sample means.
  std::vector<double> mean(k_all, 0.0);
  for (std::size_t t = 0; t < m; ++t)
    for (std::size_t k = 0; k < k_all; ++k) mean[k] += losses.at(t, k);
  for (double& v : mean) v /= static_cast<double>(m);
  double loss_scale = 0.0;
  for (double v : mean) loss_scale = std::max(loss_scale, std::fabs(v));

  // One moving-block index set per bootstrap replicate, shared by all models.
  std::mt19937_64 rng(cfg.rng_seed);
  const std::size_t n_blocks = (m + block - 1) / block;
  std::vector<double> boot_mean(n_boot * k_all, 0.0);
  std::vector<std::size_t> idx(m);
  for (std::size_t b = 0; b < n_boot; ++b) {
    std::size_t pos = 0;
    for (std::size_t j = 0; j < n_blocks && pos < m; ++j) {
      const auto start = static_cast<std::size_t>(
          (static_cast<double>(rng() >> 11) * 0x1.0p-53) *
          static_cast<double>(m - block + 1));
      for (std::size_t o = 0; o < block && pos < m; ++o) idx[pos++] = start + o;
    }
    double* bm = boot_mean.data() + b * k_all;
    for (std::size_t t = 0; t < m; ++t) {
      const double* row = losses.values.data() + idx[t] * k_all;
      for (std::size_t k = 0; k < k_all; ++k) bm[k] += row[k];
    }
    for (std::size_t k = 0; k < k_all; ++k) bm[k] /= static_cast<double>(m);
  }

  // Full elimination sequence with monotonized p-values; membership at the
  // requested level is a threshold on those p-values.
  std::vector<std::size_t> active(k_all);
  for (std::size_t k = 0; k < k_all; ++k) active[k] = k;
  double p_prev = 0.0;

  while (active.size() > 1) {
    const std::size_t ka = active.size();

    // Pairwise variances from the bootstrap.
    std::vector<double> var(ka * ka, 0.0);
    for (std::size_t b = 0; b < n_boot; ++b) {
      const double* bm = boot_mean.data() + b * k_all;
      for (std::size_t i = 0; i < ka; ++i) {
        for (std::size_t j = i + 1; j < ka; ++j) {
          const double d = (bm[active[i]] - bm[active[j]]) -
                           (mean[active[i]] - mean[active[j]]);
          var[i * ka + j] += d * d;
        }
      }
    }
    for (double& v : var) v /= static_cast<double>(n_boot);

    // Observed statistic over pairs.
    double t_obs = 0.0;
    for (std::size_t i = 0; i < ka; ++i) {
      for (std::size_t j = i + 1; j < ka; ++j) {
        const double t_ij = studentize(mean[active[i]] - mean[active[j]],
                                       var[i * ka + j], loss_scale);
        if (cfg.method == McsMethod::R)
          t_obs = std::max(t_obs, std::fabs(t_ij));
        else
          t_obs += t_ij * t_ij;
      }
    }

    // Bootstrap null distribution of the same statistic.
    std::size_t n_geq = 0;
    for (std::size_t b = 0; b < n_boot; ++b) {
      const double* bm = boot_mean.data() + b * k_all;
      double t_star = 0.0;
      for (std::size_t i = 0; i < ka; ++i) {
        for (std::size_t j = i + 1; j < ka; ++j) {
          const double v = var[i * ka + j];
          const double d = (bm[active[i]] - bm[active[j]]) -
                           (mean[active[i]] - mean[active[j]]);
          const double t_ij = studentize(d, v, loss_scale);
          if (cfg.method == McsMethod::R)
            t_star = std::max(t_star, std::fabs(t_ij));
          else
            t_star += t_ij * t_ij;
        }
      }
      if (t_star >= t_obs) ++n_geq;
    }
    const double p_raw = static_cast<double>(n_geq) / static_cast<double>(n_boot);
    const double p_mon = std::max(p_raw, p_prev);
    p_prev = p_mon;

    // Eliminate the model with the largest studentized loss against the
    // average of the others.
    std::size_t worst = 0;
    double worst_t = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ka; ++i) {
      double dbar = 0.0;
      for (std::size_t j = 0; j < ka; ++j)
        dbar += mean[active[i]] - mean[active[j]];
      dbar /= static_cast<double>(ka);
      double v = 0.0;
      for (std::size_t b = 0; b < n_boot; ++b) {
        const double* bm = boot_mean.data() + b * k_all;
        double dstar = 0.0;
        for (std::size_t j = 0; j < ka; ++j)
          dstar += bm[active[i]] - bm[active[j]];
        dstar /= static_cast<double>(ka);
        v += (dstar - dbar) * (dstar - dbar);
      }
      v /= static_cast<double>(n_boot);
      const double t_i = studentize(dbar, v, loss_scale);
      if (t_i > worst_t) {
        worst_t = t_i;
        worst = i;
      }
    }

    const std::size_t worst_model = active[worst];
    result.p_values[worst_model] = p_mon;
    result.elimination_order.push_back(worst_model);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  result.p_values[active[0]] = 1.0;

  const double threshold = 1.0 - cfg.level;
  for (std::size_t k = 0; k < k_all; ++k) {
    result.in_mcs[k] = result.p_values[k] >= threshold;
    if (result.in_mcs[k]) result.survivors.push_back(losses.models[k]);
  }
  return result;
}

}  // namespace wqes
