#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "wqes/io.hpp"
#include "wqes/parallel.hpp"
#include "wqes/wq.hpp"

namespace wqes::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (...) {
    throw ValidationError("config key `" + key + "`: not a number: `" + value + "`");
  }
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (...) {
    throw ValidationError("config key `" + key + "`: not an integer: `" + value + "`");
  }
}

EsVariantTag parse_variant(const std::string& name) {
  if (name == "WQ-Beta") return EsVariantTag::WqBeta;
  if (name == "WQ-EW") return EsVariantTag::WqEw;
  if (name == "WQ-UNC") return EsVariantTag::WqUnc;
  if (name == "SA-BC") return EsVariantTag::SaBc;
  if (name == "SA-No-BC" || name == "SA-NO-BC") return EsVariantTag::SaNoBc;
  throw ValidationError("unknown ES variant: " + name);
}

CaviarForm parse_form(const std::string& name) {
  if (name == "SAV" || name == "sav") return CaviarForm::Sav;
  if (name == "AS" || name == "as") return CaviarForm::As;
  throw ValidationError("caviar form must be SAV or AS, got: " + name);
}

std::string sanitize(std::string name) {
  for (char& c : name)
    if (c == ':' || c == '=' || c == ',' || c == '/' || c == ' ') c = '_';
  return name;
}

std::string series_label(const std::filesystem::path& p) {
  return sanitize(p.stem().string());
}

// Fractional ranks (ties averaged), 1 = smallest loss.
std::vector<double> fractional_ranks(const std::vector<double>& losses) {
  const std::size_t k = losses.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return losses[a] < losses[b];
  });
  std::vector<double> ranks(k, 0.0);
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j + 1 < k && losses[order[j + 1]] == losses[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t u = i; u <= j; ++u) ranks[order[u]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "data") {
    for (const auto& f : split_list(value)) cfg.data_files.emplace_back(f);
  } else if (key == "loss_files") {
    for (const auto& f : split_list(value)) cfg.loss_files.emplace_back(f);
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "models") {
    cfg.model_names = split_list(value);
  } else if (key == "alpha") {
    cfg.alpha = to_double(key, value);
  } else if (key == "alpha1") {
    cfg.alpha1 = to_double(key, value);
  } else if (key == "care_grid") {
    cfg.care_grid = static_cast<int>(to_long(key, value));
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(to_long(key, value));
  } else if (key == "workers") {
    cfg.workers = static_cast<unsigned>(to_long(key, value));
  } else if (key == "n_candidates") {
    cfg.ms.n_candidates = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "n_refine") {
    cfg.ms.n_refine = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "max_iterations") {
    cfg.ms.max_iterations = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "gradient_tolerance") {
    cfg.ms.gradient_tolerance = to_double(key, value);
  } else if (key == "dgp") {
    if (value == "model1" || value == "av-garch-t") {
      cfg.dgp.form = DgpForm::AvGarchT;
    } else if (value == "model2" || value == "garch-t") {
      cfg.dgp.form = DgpForm::GarchT;
    } else {
      throw ValidationError("dgp must be model1/av-garch-t or model2/garch-t");
    }
  } else if (key == "omega") {
    cfg.dgp.omega = to_double(key, value);
  } else if (key == "gamma") {
    cfg.dgp.gamma = to_double(key, value);
  } else if (key == "delta") {
    cfg.dgp.delta = to_double(key, value);
  } else if (key == "nu") {
    cfg.dgp.nu = to_double(key, value);
  } else if (key == "n") {
    cfg.dgp.n = static_cast<int>(to_long(key, value));
  } else if (key == "n_reps") {
    cfg.dgp.n_reps = static_cast<int>(to_long(key, value));
  } else if (key == "variants") {
    cfg.variant_names = split_list(value);
  } else if (key == "m_set") {
    cfg.m_set.clear();
    for (const auto& s : split_list(value))
      cfg.m_set.push_back(static_cast<int>(to_long(key, s)));
  } else if (key == "alpha1_set") {
    cfg.alpha1_set.clear();
    for (const auto& s : split_list(value)) cfg.alpha1_set.push_back(to_double(key, s));
  } else if (key == "caviar") {
    cfg.caviar = value;
  } else if (key == "in_sample_n") {
    cfg.rolling.in_sample_n = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "out_sample_m") {
    cfg.rolling.out_sample_m = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "refit_interval") {
    cfg.rolling.refit_interval = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "mcs_level") {
    cfg.mcs.level = to_double(key, value);
  } else if (key == "mcs_method") {
    if (value != "R" && value != "SQ" && value != "both")
      throw ValidationError("mcs_method must be R, SQ or both");
    cfg.mcs_method = value;
  } else if (key == "block_length") {
    cfg.mcs.block_length = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "n_boot") {
    cfg.mcs.n_boot = static_cast<std::size_t>(to_long(key, value));
  } else if (key == "beta_params") {
    cfg.beta_shapes.clear();
    for (const auto& s : split_list(value)) {
      const auto colon = s.find(':');
      if (colon == std::string::npos)
        throw ValidationError("beta_params entries must look like a:b, got " + s);
      cfg.beta_shapes.emplace_back(to_double(key, s.substr(0, colon)),
                                   to_double(key, s.substr(colon + 1)));
    }
  } else if (key == "grid_points") {
    cfg.grid_points = static_cast<int>(to_long(key, value));
  } else {
    throw ValidationError("unknown config key: " + key);
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path.string() + ": line " + std::to_string(line_no) +
                            ": expected `key = value`");
    apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 0.5))
    throw ValidationError("alpha must lie in (0, 0.5)");
  if (!(cfg.alpha1 > 0.0) || !(cfg.alpha1 < cfg.alpha))
    throw ValidationError("alpha1 must lie in (0, alpha)");
  if (cfg.ms.n_candidates == 0 || cfg.ms.n_refine == 0 ||
      cfg.ms.n_refine > cfg.ms.n_candidates)
    throw ValidationError("need 1 <= n_refine <= n_candidates");

  const auto check_models = [&] {
    if (cfg.model_names.empty()) throw ValidationError("no models configured");
    for (const auto& name : cfg.model_names) {
      try {
        ModelSpec spec = ModelSpec::parse(name, cfg.alpha1);
        if (spec.kind == ModelSpec::Kind::Wq &&
            !(spec.variant.alpha1 > 0.0 && spec.variant.alpha1 < cfg.alpha))
          throw ValidationError("model " + name + ": alpha1 must lie in (0, alpha)");
      } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
      }
    }
  };
  const auto check_data = [&] {
    if (cfg.data_files.empty()) throw ValidationError("no data files configured");
    for (const auto& f : cfg.data_files)
      if (!std::filesystem::exists(f))
        throw ValidationError("data file does not exist: " + f.string());
  };

  if (cfg.command == "simulate") {
    if (cfg.dgp.n_reps < 1) throw ValidationError("n_reps must be positive");
    if (cfg.dgp.n < 250) throw ValidationError("simulated length n must be >= 250");
    for (int m : cfg.m_set)
      if (m < 2) throw ValidationError("m_set entries must be >= 2");
    for (double a1 : cfg.alpha1_set)
      if (!(a1 > 0.0) || !(a1 < cfg.alpha))
        throw ValidationError("alpha1_set entries must lie in (0, alpha)");
    for (const auto& v : cfg.variant_names) parse_variant(v);
    parse_form(cfg.caviar);
  } else if (cfg.command == "fit") {
    check_models();
    check_data();
  } else if (cfg.command == "backtest") {
    check_models();
    check_data();
    if (cfg.rolling.in_sample_n < 250)
      throw ValidationError("in_sample_n must be >= 250");
    if (cfg.rolling.out_sample_m == 0)
      throw ValidationError("out_sample_m must be positive");
    if (cfg.rolling.refit_interval == 0)
      throw ValidationError("refit_interval must be >= 1");
  } else if (cfg.command == "mcs") {
    if (cfg.loss_files.empty()) throw ValidationError("no loss files configured");
    for (const auto& f : cfg.loss_files)
      if (!std::filesystem::exists(f))
        throw ValidationError("loss file does not exist: " + f.string());
    if (!(cfg.mcs.level > 0.0) || !(cfg.mcs.level < 1.0))
      throw ValidationError("mcs_level must lie in (0,1)");
    if (cfg.mcs.n_boot < 1) throw ValidationError("n_boot must be positive");
  } else if (cfg.command == "weights-plot") {
    if (cfg.beta_shapes.empty())
      throw ValidationError("weights-plot needs beta_params (a:b pairs)");
    for (const auto& [a, b] : cfg.beta_shapes)
      if (!(a > 0.0) || !(b > 0.0))
        throw ValidationError("beta_params shapes must be positive");
    if (cfg.grid_points < 2) throw ValidationError("grid_points must be >= 2");
  } else {
    throw ValidationError("unknown command: " + cfg.command);
  }
}

namespace {

void run_simulate(const RunConfig& cfg) {
  DgpSpec spec = cfg.dgp;
  spec.rng_seed = cfg.seed;

  BiasStudyConfig study;
  study.variants.clear();
  for (const auto& v : cfg.variant_names) study.variants.push_back(parse_variant(v));
  study.m_set = cfg.m_set;
  study.alpha1_set = cfg.alpha1_set;
  study.alpha = cfg.alpha;
  study.caviar_form = parse_form(cfg.caviar);
  study.fit_cfg = cfg.ms;
  study.fit_cfg.rng_seed = cfg.seed;
  study.workers = resolve_workers(cfg.workers);

  const BiasReport report = run_bias_study(spec, study);

  std::vector<std::vector<std::string>> rows, rows_mad;
  for (const auto& cell : report.cells) {
    rows.push_back({variant_name(cell.tag), std::to_string(cell.m),
                    format_number(cell.alpha1), format_number(report.var_delta),
                    format_number(cell.es_delta)});
    rows_mad.push_back({variant_name(cell.tag), std::to_string(cell.m),
                        format_number(cell.alpha1), format_number(report.var_mad),
                        format_number(cell.es_mad)});
  }
  const std::vector<std::string> header{"variant", "M", "alpha1", "var_delta",
                                        "es_delta"};
  write_table_csv(cfg.out_dir / "bias_table.csv", header, rows);
  write_table_csv(cfg.out_dir / "bias_table_mad.csv", header, rows_mad);

  std::vector<std::vector<std::string>> wrows;
  for (const auto& ws : report.weight_samples) {
    for (std::size_t i = 0; i < ws.weights.size(); ++i) {
      wrows.push_back({std::to_string(ws.rep), std::to_string(ws.m),
                       format_number(ws.alpha1), format_number(ws.a),
                       format_number(ws.b), format_number(ws.levels[i]),
                       format_number(ws.weights[i])});
    }
  }
  write_table_csv(cfg.out_dir / "weights_hist.csv",
                  {"rep", "M", "alpha1", "a", "b", "level", "weight"}, wrows);

  std::cout << "simulate: " << report.n_reps_done << " replications ("
            << report.n_failed << " failed), mean true VaR "
            << format_number(report.mean_true_var) << ", mean true ES "
            << format_number(report.mean_true_es) << "\n";
  if (!report.failures.empty()) {
    std::ofstream log(cfg.out_dir / "simulate_log.txt");
    for (const auto& f : report.failures) log << f << '\n';
  }
}

void run_fit(const RunConfig& cfg) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t di = 0; di < cfg.data_files.size(); ++di) {
    const ReturnSeries series = load_returns(cfg.data_files[di]);
    const std::string label = series_label(cfg.data_files[di]);
    for (std::size_t mi = 0; mi < cfg.model_names.size(); ++mi) {
      ModelSpec spec = ModelSpec::parse(cfg.model_names[mi], cfg.alpha1);
      spec.care_grid_size = cfg.care_grid;
      MultiStartConfig ms = cfg.ms;
      ms.workers = resolve_workers(cfg.workers);
      auto model = make_forecaster(spec, cfg.alpha, ms);
      model->fit(series, derive_seed(derive_seed(cfg.seed, di), mi));
      const VarEs fc = model->forecast(series);
      rows.push_back({label, spec.name, format_number(round_sig(fc.var)),
                      format_number(round_sig(fc.es))});
    }
  }
  write_table_csv(cfg.out_dir / "fit_summary.csv",
                  {"series", "model", "var", "es"}, rows);
  std::cout << "fit: wrote " << rows.size() << " forecasts\n";
}

struct BacktestCell {
  ForecastSeries forecasts;
  std::vector<double> qloss;
  std::vector<double> jloss;
  double qloss_sum = 0.0;
  double jloss_sum = 0.0;
  std::vector<std::string> events;
};

void run_backtest(const RunConfig& cfg) {
  const std::size_t n = cfg.rolling.in_sample_n;
  const std::size_t m = cfg.rolling.out_sample_m;

  std::vector<ReturnSeries> all_series;
  for (const auto& f : cfg.data_files) {
    ReturnSeries s = load_returns(f);
    if (s.size() < n + m)
      throw ValidationError(f.string() + ": series too short for n + m = " +
                            std::to_string(n + m));
    all_series.push_back(std::move(s));
  }

  const std::size_t n_models = cfg.model_names.size();
  const std::size_t n_tasks = all_series.size() * n_models;
  std::vector<BacktestCell> cells(n_tasks);
  const unsigned workers = resolve_workers(cfg.workers);

  parallel_for(n_tasks, workers, [&](std::size_t task) {
    const std::size_t di = task / n_models;
    const std::size_t mi = task % n_models;
    const ReturnSeries& series = all_series[di];
    ModelSpec spec = ModelSpec::parse(cfg.model_names[mi], cfg.alpha1);
    spec.care_grid_size = cfg.care_grid;
    MultiStartConfig ms = cfg.ms;
    ms.workers = 1;  // parallelism lives at the task level

    RollingResult rr = rolling_forecast(series, spec, cfg.rolling, cfg.alpha, ms,
                                        derive_seed(derive_seed(cfg.seed, di), mi));
    BacktestCell& cell = cells[task];
    cell.events = std::move(rr.events);
    cell.forecasts.var.resize(m);
    cell.forecasts.es.resize(m);
    cell.forecasts.dates.resize(m);
    cell.qloss.resize(m);
    cell.jloss.resize(m);
    for (std::size_t s = 0; s < m; ++s) {
      // Serialization precision is applied before losses so reloaded forecast
      // files reproduce the loss matrices exactly.
      const double var = round_sig(rr.var[s]);
      const double es = round_sig(rr.es[s]);
      const double r = series.values[s + n];
      cell.forecasts.var[s] = var;
      cell.forecasts.es[s] = es;
      cell.forecasts.dates[s] = series.dates.empty() ? std::to_string(s + n + 1)
                                                     : series.dates[s + n];
      const double ind = r < var ? 1.0 : 0.0;
      cell.qloss[s] = round_sig((cfg.alpha - ind) * (r - var));
      if (!(es < 0.0))
        throw std::domain_error(spec.name + ": nonnegative ES forecast at step " +
                                std::to_string(s));
      cell.jloss[s] = round_sig(al_joint_loss(r, var, es, cfg.alpha));
      cell.qloss_sum += cell.qloss[s];
      cell.jloss_sum += cell.jloss[s];
    }
  });

  // Per-series artifacts.
  for (std::size_t di = 0; di < all_series.size(); ++di) {
    const std::string label = series_label(cfg.data_files[di]);
    LossMatrix qlm, jlm;
    for (const auto& name : cfg.model_names) {
      qlm.models.push_back(name);
      jlm.models.push_back(name);
    }
    qlm.n_steps = jlm.n_steps = m;
    qlm.values.resize(m * n_models);
    jlm.values.resize(m * n_models);
    for (std::size_t mi = 0; mi < n_models; ++mi) {
      const BacktestCell& cell = cells[di * n_models + mi];
      write_forecast_csv(cfg.out_dir / ("forecast_" + label + "_" +
                                        sanitize(cfg.model_names[mi]) + ".csv"),
                         cell.forecasts);
      for (std::size_t s = 0; s < m; ++s) {
        qlm.values[s * n_models + mi] = cell.qloss[s];
        jlm.values[s * n_models + mi] = cell.jloss[s];
      }
    }
    qlm.dates = cells[di * n_models].forecasts.dates;
    jlm.dates = qlm.dates;
    write_loss_csv(cfg.out_dir / ("quantile_losses_" + label + ".csv"), qlm);
    write_loss_csv(cfg.out_dir / ("joint_losses_" + label + ".csv"), jlm);
  }

  // Summaries in the layout of the loss tables: per-series loss, average loss,
  // average rank.
  const auto write_summary = [&](const std::string& file, bool joint) {
    std::vector<std::string> header{"model"};
    for (const auto& f : cfg.data_files) header.push_back(series_label(f));
    header.emplace_back("avg_loss");
    header.emplace_back("avg_rank");

    std::vector<std::vector<double>> per_series(all_series.size(),
                                                std::vector<double>(n_models));
    for (std::size_t di = 0; di < all_series.size(); ++di)
      for (std::size_t mi = 0; mi < n_models; ++mi)
        per_series[di][mi] = joint ? cells[di * n_models + mi].jloss_sum
                                   : cells[di * n_models + mi].qloss_sum;
    std::vector<std::vector<double>> ranks;
    for (const auto& losses : per_series) ranks.push_back(fractional_ranks(losses));

    std::vector<std::vector<std::string>> rows;
    for (std::size_t mi = 0; mi < n_models; ++mi) {
      std::vector<std::string> row{cfg.model_names[mi]};
      double avg_loss = 0.0, avg_rank = 0.0;
      for (std::size_t di = 0; di < all_series.size(); ++di) {
        row.push_back(format_number(round_sig(per_series[di][mi])));
        avg_loss += per_series[di][mi];
        avg_rank += ranks[di][mi];
      }
      avg_loss /= static_cast<double>(all_series.size());
      avg_rank /= static_cast<double>(all_series.size());
      row.push_back(format_number(round_sig(avg_loss)));
      row.push_back(format_number(round_sig(avg_rank)));
      rows.push_back(std::move(row));
    }
    write_table_csv(cfg.out_dir / file, header, rows);
  };
  write_summary("quantile_loss_summary.csv", false);
  write_summary("joint_loss_summary.csv", true);

  std::size_t n_events = 0;
  std::ofstream log;
  for (std::size_t task = 0; task < n_tasks; ++task) {
    for (const auto& e : cells[task].events) {
      if (!log.is_open()) log.open(cfg.out_dir / "backtest_log.txt");
      log << cfg.model_names[task % n_models] << ": " << e << '\n';
      ++n_events;
    }
  }
  std::cout << "backtest: " << all_series.size() << " series x " << n_models
            << " models, " << n_events << " carried-forward refits\n";
}

void run_mcs(const RunConfig& cfg) {
  const bool do_r = cfg.mcs_method == "R" || cfg.mcs_method == "both";
  const bool do_sq = cfg.mcs_method == "SQ" || cfg.mcs_method == "both";

  std::map<std::string, std::size_t> r_total, sq_total;
  std::vector<std::string> model_order;

  for (const auto& file : cfg.loss_files) {
    const LossMatrix lm = load_loss_csv(file);
    for (const auto& name : lm.models)
      if (!r_total.count(name)) {
        r_total[name] = 0;
        sq_total[name] = 0;
        model_order.push_back(name);
      }

    std::vector<std::vector<std::string>> rows;
    for (const auto& [method, enabled] :
         {std::pair{McsMethod::R, do_r}, std::pair{McsMethod::Sq, do_sq}}) {
      if (!enabled) continue;
      McsConfig mc = cfg.mcs;
      mc.method = method;
      mc.rng_seed = cfg.seed;
      const McsResult res = mcs(lm, mc);
      const char* mname = method == McsMethod::R ? "R" : "SQ";
      for (std::size_t k = 0; k < lm.models.size(); ++k) {
        rows.push_back({lm.models[k], mname, format_number(res.p_values[k]),
                        res.in_mcs[k] ? "1" : "0"});
        if (res.in_mcs[k]) {
          if (method == McsMethod::R) ++r_total[lm.models[k]];
          else ++sq_total[lm.models[k]];
        }
      }
    }
    write_table_csv(cfg.out_dir / ("mcs_membership_" + series_label(file) + ".csv"),
                    {"model", "method", "p_value", "in_mcs"}, rows);
  }

  std::vector<std::vector<std::string>> rows;
  for (const auto& name : model_order)
    rows.push_back({name, std::to_string(r_total[name]),
                    std::to_string(sq_total[name])});
  write_table_csv(cfg.out_dir / "mcs_summary.csv", {"model", "r_total", "sq_total"},
                  rows);
  std::cout << "mcs: " << cfg.loss_files.size() << " loss files, "
            << model_order.size() << " models\n";
}

void run_weights_plot(const RunConfig& cfg) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [a, b] : cfg.beta_shapes) {
    const std::vector<double> w =
        weights_from_beta({a, b}, static_cast<std::size_t>(cfg.grid_points));
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double x = static_cast<double>(i + 1) / static_cast<double>(cfg.grid_points);
      rows.push_back({format_number(a), format_number(b),
                      format_number(round_sig(x)), format_number(round_sig(w[i]))});
    }
  }
  write_table_csv(cfg.out_dir / "beta_shapes.csv", {"a", "b", "x", "weight"}, rows);
  std::cout << "weights-plot: wrote " << rows.size() << " points\n";
}

}  // namespace

void run(const RunConfig& cfg) {
  validate(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  if (cfg.command == "simulate") return run_simulate(cfg);
  if (cfg.command == "fit") return run_fit(cfg);
  if (cfg.command == "backtest") return run_backtest(cfg);
  if (cfg.command == "mcs") return run_mcs(cfg);
  if (cfg.command == "weights-plot") return run_weights_plot(cfg);
  throw ValidationError("unknown command: " + cfg.command);
}

}  // namespace wqes::cli
