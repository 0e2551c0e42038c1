#include "wqes/backtest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "wqes/parallel.hpp"

namespace wqes {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool consume_prefix(std::string& s, const std::string& prefix) {
  if (lower(s).rfind(lower(prefix), 0) != 0) return false;
  s = s.substr(prefix.size());
  return true;
}

CaviarForm parse_caviar_form(const std::string& s) {
  const std::string l = lower(s);
  if (l == "sav") return CaviarForm::Sav;
  if (l == "as") return CaviarForm::As;
  throw std::invalid_argument("model descriptor: expected SAV or AS, got '" + s + "'");
}

}  // namespace

ModelSpec ModelSpec::parse(const std::string& descriptor, double default_alpha1) {
  std::string body = descriptor;
  // Options after ':' as key=value pairs; only alpha1 is recognized.
  double alpha1 = default_alpha1;
  if (const auto colon = body.find(':'); colon != std::string::npos) {
    std::string opts = body.substr(colon + 1);
    body = body.substr(0, colon);
    std::size_t pos = 0;
    while (pos < opts.size()) {
      const auto next = opts.find(',', pos);
      const std::string kv = opts.substr(pos, next == std::string::npos ? next : next - pos);
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("model descriptor option without '=': " + kv);
      const std::string key = lower(kv.substr(0, eq));
      const std::string val = kv.substr(eq + 1);
      if (key == "alpha1") {
        alpha1 = std::stod(val);
      } else {
        throw std::invalid_argument("unknown model descriptor option: " + key);
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  }

  ModelSpec spec;
  spec.name = descriptor;

  const std::string l = lower(body);
  if (l == "garch-t") {
    spec.kind = Kind::Garch;
    return spec;
  }
  if (l == "care-sav") {
    spec.kind = Kind::Care;
    spec.caviar_form = CaviarForm::Sav;
    return spec;
  }
  if (consume_prefix(body, "ES-CAViaR-")) {
    spec.kind = Kind::EsCaviar;
    if (consume_prefix(body, "Add-")) {
      spec.es_caviar_form = EsCaviarForm::Add;
    } else if (consume_prefix(body, "Mult-")) {
      spec.es_caviar_form = EsCaviarForm::Mult;
    } else {
      throw std::invalid_argument("model descriptor: expected ES-CAViaR-Add/Mult: " +
                                  descriptor);
    }
    spec.caviar_form = parse_caviar_form(body);
    return spec;
  }

  // Weighted-quantile family: <variant>-<M>-<SAV|AS>.
  static const std::pair<const char*, EsVariantTag> kFamilies[] = {
      {"WQ-Beta-", EsVariantTag::WqBeta}, {"WQ-EW-", EsVariantTag::WqEw},
      {"WQ-UNC-", EsVariantTag::WqUnc},   {"SA-BC-", EsVariantTag::SaBc},
      {"SA-No-BC-", EsVariantTag::SaNoBc}};
  for (const auto& [prefix, tag] : kFamilies) {
    if (!consume_prefix(body, prefix)) continue;
    spec.kind = Kind::Wq;
    spec.variant.tag = tag;
    spec.variant.alpha1 = alpha1;
    const auto dash = body.find('-');
    if (dash == std::string::npos)
      throw std::invalid_argument("model descriptor: expected <M>-<SAV|AS>: " +
                                  descriptor);
    try {
      spec.variant.m = std::stoi(body.substr(0, dash));
    } catch (...) {
      throw std::invalid_argument("model descriptor: bad grid size: " + descriptor);
    }
    if (spec.variant.m < 2)
      throw std::invalid_argument("model descriptor: M must be at least 2: " +
                                  descriptor);
    spec.caviar_form = parse_caviar_form(body.substr(dash + 1));
    return spec;
  }
  throw std::invalid_argument("unrecognized model descriptor: " + descriptor);
}

namespace {

class WqForecaster final : public Forecaster {
 public:
  WqForecaster(const ModelSpec& spec, double alpha, MultiStartConfig cfg)
      : spec_(spec), alpha_(alpha), cfg_(std::move(cfg)) {
    grid_ = build_grid(alpha_, spec_.variant.alpha1, spec_.variant.m,
                       spec_.variant.tag);
  }

  const std::string& name() const override { return spec_.name; }
  bool is_fitted() const override { return fitted_; }

  void fit(const ReturnSeries& window, std::uint64_t seed) override {
    MultiStartConfig cfg = cfg_;
    cfg.rng_seed = seed;
    const CaviarGridFit gf =
        fit_caviar_grid(window, grid_, spec_.caviar_form, cfg);
    const EsWeightFit wfit = fit_es_weights(window, gf.matrix, spec_.variant, cfg);
    level_params_.clear();
    for (const auto& lf : gf.level_fits) level_params_.push_back(lf.params);
    weight_fit_ = wfit;
    fitted_ = true;
  }

  VarEs forecast(const ReturnSeries& window) const override {
    if (!fitted_) throw std::logic_error("WqForecaster: forecast before fit");
    std::span<const double> r{window.values};
    const std::size_t n0 = std::min<std::size_t>(r.size(), 100);
    std::vector<double> row(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double q_init =
          empirical_quantile({r.data(), n0}, grid_.levels[i]);
      const std::vector<double> path =
          caviar_filter(spec_.caviar_form, level_params_[i], r, q_init);
      row[i] = caviar_step(spec_.caviar_form, level_params_[i], r.back(),
                           path.back());
    }
    row = rearrange(std::move(row));
    const EsForecast fc = forecast_es(weight_fit_, row);
    return {fc.var, fc.es};
  }

 private:
  ModelSpec spec_;
  double alpha_;
  MultiStartConfig cfg_;
  QuantileGrid grid_;
  std::vector<CaviarParams> level_params_;
  EsWeightFit weight_fit_;
  bool fitted_ = false;
};

class EsCaviarForecaster final : public Forecaster {
 public:
  EsCaviarForecaster(const ModelSpec& spec, double alpha, MultiStartConfig cfg)
      : spec_(spec), alpha_(alpha), cfg_(std::move(cfg)) {}

  const std::string& name() const override { return spec_.name; }
  bool is_fitted() const override { return fitted_; }

  void fit(const ReturnSeries& window, std::uint64_t seed) override {
    MultiStartConfig cfg = cfg_;
    cfg.rng_seed = seed;
    fit_ = fit_es_caviar(window, alpha_, spec_.es_caviar_form, spec_.caviar_form, cfg);
    fitted_ = true;
  }

  VarEs forecast(const ReturnSeries& window) const override {
    if (!fitted_) throw std::logic_error("EsCaviarForecaster: forecast before fit");
    return es_caviar_forecast(fit_, window);
  }

 private:
  ModelSpec spec_;
  double alpha_;
  MultiStartConfig cfg_;
  EsCaviarFit fit_;
  bool fitted_ = false;
};

class CareForecaster final : public Forecaster {
 public:
  CareForecaster(const ModelSpec& spec, double alpha, MultiStartConfig cfg)
      : spec_(spec), alpha_(alpha), cfg_(std::move(cfg)) {}

  const std::string& name() const override { return spec_.name; }
  bool is_fitted() const override { return fitted_; }

  void fit(const ReturnSeries& window, std::uint64_t seed) override {
    MultiStartConfig cfg = cfg_;
    cfg.rng_seed = seed;
    fit_ = fit_care_sav(window, alpha_, spec_.care_grid_size, cfg);
    fitted_ = true;
  }

  VarEs forecast(const ReturnSeries& window) const override {
    if (!fitted_) throw std::logic_error("CareForecaster: forecast before fit");
    return care_forecast(fit_, window, alpha_);
  }

 private:
  ModelSpec spec_;
  double alpha_;
  MultiStartConfig cfg_;
  CareFit fit_;
  bool fitted_ = false;
};

class GarchForecaster final : public Forecaster {
 public:
  GarchForecaster(const ModelSpec& spec, double alpha, MultiStartConfig cfg)
      : spec_(spec), alpha_(alpha), cfg_(std::move(cfg)) {}

  const std::string& name() const override { return spec_.name; }
  bool is_fitted() const override { return fitted_; }

  void fit(const ReturnSeries& window, std::uint64_t seed) override {
    MultiStartConfig cfg = cfg_;
    cfg.rng_seed = seed;
    fit_ = fit_garch_t(window, alpha_, cfg);
    fitted_ = true;
  }

  VarEs forecast(const ReturnSeries& window) const override {
    if (!fitted_) throw std::logic_error("GarchForecaster: forecast before fit");
    return garch_t_forecast(fit_, window, alpha_);
  }

 private:
  ModelSpec spec_;
  double alpha_;
  MultiStartConfig cfg_;
  GarchTFit fit_;
  bool fitted_ = false;
};

}  // namespace

std::unique_ptr<Forecaster> make_forecaster(const ModelSpec& spec, double alpha,
                                            const MultiStartConfig& cfg) {
  switch (spec.kind) {
    case ModelSpec::Kind::Wq:
      return std::make_unique<WqForecaster>(spec, alpha, cfg);
    case ModelSpec::Kind::EsCaviar:
      return std::make_unique<EsCaviarForecaster>(spec, alpha, cfg);
    case ModelSpec::Kind::Care:
      return std::make_unique<CareForecaster>(spec, alpha, cfg);
    case ModelSpec::Kind::Garch:
      return std::make_unique<GarchForecaster>(spec, alpha, cfg);
  }
  throw std::logic_error("make_forecaster: unknown model kind");
}

RollingResult rolling_forecast(const ReturnSeries& returns, Forecaster& model,
                               const RollingConfig& cfg, std::uint64_t seed) {
  const std::size_t n = cfg.in_sample_n;
  const std::size_t m = cfg.out_sample_m;
  if (n == 0 || m == 0)
    throw std::domain_error("rolling_forecast: window sizes must be positive");
  if (cfg.refit_interval == 0)
    throw std::domain_error("rolling_forecast: refit_interval must be >= 1");
  if (n + m > returns.size())
    throw std::domain_error("rolling_forecast: series shorter than n + m");

  RollingResult result;
  result.var.resize(m);
  result.es.resize(m);

  for (std::size_t s = 0; s < m; ++s) {
    ReturnSeries window;
    window.values.assign(returns.values.begin() + static_cast<std::ptrdiff_t>(s),
                         returns.values.begin() + static_cast<std::ptrdiff_t>(s + n));
    if (!returns.dates.empty())
      window.dates.assign(returns.dates.begin() + static_cast<std::ptrdiff_t>(s),
                          returns.dates.begin() + static_cast<std::ptrdiff_t>(s + n));

    if (s % cfg.refit_interval == 0) {
      try {
        model.fit(window, derive_seed(seed, s));
      } catch (const std::exception& e) {
        if (!model.is_fitted()) throw;
        result.events.push_back("step " + std::to_string(s) + ": refit failed (" +
                                e.what() + "); parameters carried forward");
      }
    }
    const VarEs f = model.forecast(window);
    result.var[s] = f.var;
    result.es[s] = f.es;
  }
  return result;
}

RollingResult rolling_forecast(const ReturnSeries& returns, const ModelSpec& spec,
                               const RollingConfig& cfg, double alpha,
                               const MultiStartConfig& ms_cfg, std::uint64_t seed) {
  const std::unique_ptr<Forecaster> model = make_forecaster(spec, alpha, ms_cfg);
  return rolling_forecast(returns, *model, cfg, seed);
}

double aggregate_quantile_loss(std::span<const double> returns_out,
                               std::span<const double> var_series, double alpha) {
  if (returns_out.size() != var_series.size())
    throw std::domain_error("aggregate_quantile_loss: length mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < returns_out.size(); ++t) {
    const double ind = returns_out[t] < var_series[t] ? 1.0 : 0.0;
    sum += (alpha - ind) * (returns_out[t] - var_series[t]);
  }
  return sum;
}

double aggregate_joint_loss(std::span<const double> returns_out,
                            std::span<const double> var_series,
                            std::span<const double> es_series, double alpha) {
  if (returns_out.size() != var_series.size() ||
      returns_out.size() != es_series.size())
    throw std::domain_error("aggregate_joint_loss: length mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < returns_out.size(); ++t) {
    if (!(es_series[t] < 0.0))
      throw std::domain_error("aggregate_joint_loss: nonnegative ES at step " +
                              std::to_string(t));
    sum += al_joint_loss(returns_out[t], var_series[t], es_series[t], alpha);
  }
  return sum;
}

}  // namespace wqes
