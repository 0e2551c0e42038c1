#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wqes/baselines.hpp"
#include "wqes/caviar.hpp"
#include "wqes/optimize.hpp"
#include "wqes/returns.hpp"
#include "wqes/wq.hpp"

namespace wqes {

struct RollingConfig {
  std::size_t in_sample_n = 0;
  std::size_t out_sample_m = 0;
  std::size_t refit_interval = 1;  // steps between re-estimations
};

// Parsed model descriptor. Canonical names:
//   WQ-Beta-M-SAV/AS, WQ-EW-M-..., WQ-UNC-M-..., SA-BC-M-..., SA-No-BC-M-...
//   ES-CAViaR-Add-SAV/AS, ES-CAViaR-Mult-SAV/AS, CARE-SAV, GARCH-t
// An optional ":alpha1=<x>" suffix overrides the grid lower bound of the
// weighted-quantile families.
struct ModelSpec {
  enum class Kind { Wq, EsCaviar, Care, Garch };
  Kind kind = Kind::Wq;
  EsVariant variant;                       // Wq only
  CaviarForm caviar_form = CaviarForm::Sav;
  EsCaviarForm es_caviar_form = EsCaviarForm::Add;
  int care_grid_size = 50;
  std::string name;

  static ModelSpec parse(const std::string& descriptor, double default_alpha1);
};

// One-step-ahead VaR/ES producer with persistent parameters. fit() performs a
// full re-estimation on the window; forecast() reuses the fitted parameters,
// refiltering recursion states over the current window.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual const std::string& name() const = 0;
  virtual bool is_fitted() const = 0;
  virtual void fit(const ReturnSeries& window, std::uint64_t seed) = 0;
  virtual VarEs forecast(const ReturnSeries& window) const = 0;
};

std::unique_ptr<Forecaster> make_forecaster(const ModelSpec& spec, double alpha,
                                            const MultiStartConfig& cfg);

struct RollingResult {
  std::vector<double> var;
  std::vector<double> es;
  std::vector<std::string> events;  // logged fit failures, carried parameters
};

// Rolling one-step-ahead forecasts: window s..s+n-1 produces the forecast for
// step s. Re-estimation happens when (s mod refit_interval) == 0; other steps
// reuse parameters with updated filtered state. A failed re-fit falls back to
// the previous parameters and is logged; a failure with no previous fit
// propagates.
RollingResult rolling_forecast(const ReturnSeries& returns, Forecaster& model,
                               const RollingConfig& cfg, std::uint64_t seed);

RollingResult rolling_forecast(const ReturnSeries& returns, const ModelSpec& spec,
                               const RollingConfig& cfg, double alpha,
                               const MultiStartConfig& ms_cfg, std::uint64_t seed);

// Aggregated out-of-sample scores (plain sums, no 1/m factor).
double aggregate_quantile_loss(std::span<const double> returns_out,
                               std::span<const double> var_series, double alpha);
double aggregate_joint_loss(std::span<const double> returns_out,
                            std::span<const double> var_series,
                            std::span<const double> es_series, double alpha);

}  // namespace wqes
