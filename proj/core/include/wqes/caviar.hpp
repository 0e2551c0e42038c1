#pragma once

#include <span>
#include <vector>

#include "wqes/optimize.hpp"
#include "wqes/returns.hpp"

namespace wqes {

// Response of the quantile recursion to the lagged return: symmetric absolute
// value, or asymmetric slopes for positive/negative returns.
enum class CaviarForm { Sav, As };

// SAV: (b0, b1, b2) in  Q_t = b0 + b1 |r_{t-1}| + b2 Q_{t-1}
// AS:  (b0, b1p, b1m, b2) in
//      Q_t = b0 + b1p max(r_{t-1},0) + b1m max(-r_{t-1},0) + b2 Q_{t-1}
struct CaviarParams {
  std::vector<double> beta;
};

std::size_t caviar_param_count(CaviarForm form);

// Ordered tail levels alpha_1 < ... < alpha_G with the target level marked.
struct QuantileGrid {
  std::vector<double> levels;
  std::size_t target_index = 0;

  std::size_t size() const { return levels.size(); }
  double target() const { return levels.at(target_index); }
};

// N x G in-sample conditional quantiles plus the 1 x G one-step forecasts.
// After monotonization every row (and the forecast row) is non-decreasing in
// the level index.
struct QuantileMatrix {
  QuantileGrid grid;
  std::size_t n_rows = 0;
  std::vector<double> values;     // row-major, n_rows x grid.size()
  std::vector<double> forecasts;  // grid.size()

  double at(std::size_t t, std::size_t level) const {
    return values[t * grid.size() + level];
  }
};

struct CaviarFit {
  CaviarForm form = CaviarForm::Sav;
  double alpha = 0.0;
  CaviarParams params;
  double q_init = 0.0;
  std::vector<double> path;  // in-sample quantiles, length N
  double forecast = 0.0;     // one-step-ahead quantile
  double loss = 0.0;         // minimized quantile loss
  OptimDiagnostics diagnostics;
};

struct CaviarGridFit {
  std::vector<CaviarFit> level_fits;  // one per grid level
  QuantileMatrix matrix;              // rows and forecast monotonized
};

// Mean check loss (1/N) sum (alpha - I(r_t < Q_t)) (r_t - Q_t).
double quantile_loss(std::span<const double> returns,
                     std::span<const double> quantiles, double alpha);

// Runs the recursion from Q_1 = q_init over the full return series.
std::vector<double> caviar_filter(CaviarForm form, const CaviarParams& params,
                                  std::span<const double> returns, double q_init);

// One recursion step given the previous return and quantile.
double caviar_step(CaviarForm form, const CaviarParams& params, double r_prev,
                   double q_prev);

// QML fit at a single level: multi-start minimization of the quantile loss of
// the filtered path, then one extra recursion step for the forecast.
// Q_1 is the empirical alpha-quantile of the first 100 in-sample returns.
// Requires N >= 250.
CaviarFit fit_caviar(const ReturnSeries& returns, double alpha, CaviarForm form,
                     const MultiStartConfig& cfg);

// Independent per-level fits over the grid (deterministic per-level seeds
// derived from cfg.rng_seed, so parallel and serial runs agree), followed by
// rearrangement of every in-sample row and of the forecast row.
CaviarGridFit fit_caviar_grid(const ReturnSeries& returns, const QuantileGrid& grid,
                              CaviarForm form, const MultiStartConfig& cfg);

// Quantile rearrangement of one row ordered by level: sorts ascending,
// preserving the multiset of values, so crossing rows become monotone.
std::vector<double> rearrange(std::vector<double> row);

}  // namespace wqes
