#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wqes/caviar.hpp"
#include "wqes/optimize.hpp"
#include "wqes/returns.hpp"
#include "wqes/special.hpp"

namespace wqes {

// The five ES estimators built on the first-stage quantile matrix.
enum class EsVariantTag { WqBeta, WqEw, WqUnc, SaBc, SaNoBc };

std::string variant_name(EsVariantTag tag);

struct EsVariant {
  EsVariantTag tag = EsVariantTag::WqBeta;
  int m = 3;            // number of averaged quantiles, M >= 2
  double alpha1 = 0.005;  // grid lower bound, 0 < alpha1 < alpha
};

// Equally spaced levels alpha1, alpha1+eta, ..., alpha with
// eta = (alpha - alpha1)/(M-1). For WQ-Beta one extra level alpha+eta is
// appended (grid size M+1) so the target-level weight is not pinned to zero;
// target_index marks alpha in either case.
QuantileGrid build_grid(double alpha, double alpha1, int m, EsVariantTag tag);

// w_i = w(i/G; a, b) for i = 1..G.
std::vector<double> weights_from_beta(const BetaWeightParams& p, std::size_t g);

// Fitted second-stage weights for one variant.
struct EsWeightFit {
  EsVariantTag tag = EsVariantTag::SaNoBc;
  QuantileGrid grid;                     // variant grid, target marked
  std::vector<std::size_t> columns;      // columns of the source matrix used
  double w0 = 0.0;                       // bias-correction intercept
  std::optional<BetaWeightParams> beta_params;  // WQ-Beta
  std::optional<double> w_scalar;               // WQ-EW w1
  std::optional<std::vector<double>> w_vector;  // WQ-UNC w_i >= 0
  std::vector<double> derived_weights;   // weights actually applied, per level
  double theta = 0.0;                    // sum of derived weights
  double loss = 0.0;                     // minimized aggregate joint loss
  OptimDiagnostics diagnostics;
};

// w0 + sum_i w_i q_row[i]; q_row length must match derived_weights.
double es_estimate(const EsWeightFit& fit, std::span<const double> q_row);

// AL joint score  -log((alpha-1)/es) - (r-q)(alpha - I(r<=q))/(alpha es).
// Requires es < 0.
double al_joint_loss(double r, double q, double es, double alpha);

// Step-2 fit: parameters minimize the aggregate AL joint loss of the composed
// ES path against the target-level quantile column. SA-No-BC is the plain
// average (no parameters); SA-BC fits w0; WQ-EW fits (w0, w1); WQ-Beta fits
// (w0, a, b); WQ-UNC fits (w0, w_1..w_M) with nonnegativity imposed through a
// squared reparameterization. ES >= 0 along the search is penalized with a
// large finite value (1e10) so derivative-free descent stays alive.
EsWeightFit fit_es_weights(const ReturnSeries& returns, const QuantileMatrix& qm,
                           const EsVariant& variant, const MultiStartConfig& cfg);

struct EsForecast {
  double es = 0.0;
  double var = 0.0;
  std::vector<double> components;  // per-level weighted contributions
  bool clamped = false;            // es > var was clamped to var
};

// One-step ES from the forecast quantile row matching fit.grid; var is the
// target-level element. If the composed es crosses above var it is clamped to
// var and flagged.
EsForecast forecast_es(const EsWeightFit& fit, std::span<const double> q_forecast_row);

// Convenience: pulls the variant's columns out of the source matrix forecasts.
EsForecast forecast_es(const EsWeightFit& fit, const QuantileMatrix& qm);

}  // namespace wqes
