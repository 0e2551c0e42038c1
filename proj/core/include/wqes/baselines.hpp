#pragma once

#include <vector>

#include "wqes/caviar.hpp"
#include "wqes/optimize.hpp"
#include "wqes/returns.hpp"
#include "wqes/special.hpp"

namespace wqes {

// VaR-to-ES linkage of the joint AL-score models: additive gap updated on
// violations, or a constant multiplicative rescaling.
enum class EsCaviarForm { Add, Mult };

struct EsCaviarFit {
  EsCaviarForm es_form = EsCaviarForm::Add;
  CaviarForm quantile_form = CaviarForm::Sav;
  double alpha = 0.025;
  std::vector<double> beta;   // quantile recursion parameters
  std::vector<double> gamma;  // Add: (g0,g1,g2) all >= 0; Mult: (g0) free
  double q_init = 0.0;
  double x_init = 0.0;  // Add only; initial VaR-to-ES gap, >= 0
  std::vector<double> var_path;
  std::vector<double> es_path;
  double var_forecast = 0.0;
  double es_forecast = 0.0;
  double loss = 0.0;  // minimized aggregate AL joint loss
  OptimDiagnostics diagnostics;
};

// Joint QML fit of all parameters by minimizing the aggregate AL joint loss.
// Add updates the gap x_t only when r_{t-1} <= Q_{t-1} and keeps it previous
// otherwise; Mult sets ES_t = (1 + exp(g0)) Q_t. Add uses cfg.n_candidates
// starts; the simpler Mult form is capped at 1000. Requires N >= 250.
EsCaviarFit fit_es_caviar(const ReturnSeries& returns, double alpha,
                          EsCaviarForm es_form, CaviarForm quantile_form,
                          const MultiStartConfig& cfg);

struct CareFit {
  double tau = 0.0;    // selected expectile level
  double scale = 0.0;  // 1 + tau/((1-2 tau) alpha)
  std::vector<double> beta;  // (b1, b2, b3) of the expectile recursion
  double mu_init = 0.0;
  std::vector<double> var_path;  // expectile path, used as VaR
  std::vector<double> es_path;   // scale * expectile path
  double var_forecast = 0.0;
  double es_forecast = 0.0;
  double violation_rate = 0.0;
  double als_loss = 0.0;
  std::size_t crossing_flags = 0;  // steps where es > var (positive expectile)
};

// CARE with symmetric absolute value recursion. For each of grid_size
// expectile levels in (0, alpha] the recursion is fitted by asymmetric least
// squares; the level whose in-sample violation rate is closest to alpha wins,
// with aggregate quantile loss as the tie break. Requires N >= 250.
CareFit fit_care_sav(const ReturnSeries& returns, double alpha, int grid_size,
                     const MultiStartConfig& cfg);

struct GarchTFit {
  double omega = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double nu = 0.0;
  std::vector<double> sigma;  // in-sample conditional volatility
  double sigma_forecast = 0.0;
  double var_forecast = 0.0;
  double es_forecast = 0.0;
  double neg_log_likelihood = 0.0;
  OptimDiagnostics diagnostics;
};

// GARCH(1,1) with unit-variance Student-t innovations, fitted by maximum
// likelihood with sigma^2_1 targeted at the sample variance. Forecasts apply
// the Student-t tail formulas at sigma_{N+1}. Requires N >= 250.
GarchTFit fit_garch_t(const ReturnSeries& returns, double alpha,
                      const MultiStartConfig& cfg);

// One-step forecasts from already-fitted parameters on a fresh window:
// recursion states (and their data-driven initial values) are refiltered over
// the window, the parameters are not re-estimated. fit_* report forecasts
// computed by these same routines on the fitting window.
VarEs es_caviar_forecast(const EsCaviarFit& fit, const ReturnSeries& window);
VarEs care_forecast(const CareFit& fit, const ReturnSeries& window, double alpha);
VarEs garch_t_forecast(const GarchTFit& fit, const ReturnSeries& window,
                       double alpha);

}  // namespace wqes
