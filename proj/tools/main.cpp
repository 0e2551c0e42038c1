#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "runner.hpp"
#include "wqes/optimize.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out_dir;
  std::vector<std::string> data;
  std::vector<std::string> models;
  std::vector<std::string> loss_files;
  long seed = -1;
  long workers = -1;
  long n_candidates = -1;
  long reps = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config, "Key/value config file");
  cmd->add_option("-o,--out", f.out_dir, "Output directory");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--workers", f.workers, "Worker pool size (0 = all cores)");
  cmd->add_option("--candidates", f.n_candidates, "Multi-start candidate count");
}

wqes::cli::RunConfig build_config(const std::string& command, const CommonFlags& f) {
  wqes::cli::RunConfig cfg;
  if (!f.config.empty()) cfg = wqes::cli::load_config(f.config);
  cfg.command = command;
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  for (const auto& d : f.data) cfg.data_files.emplace_back(d);
  for (const auto& l : f.loss_files) cfg.loss_files.emplace_back(l);
  if (!f.models.empty()) cfg.model_names = f.models;
  if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
  if (f.workers >= 0) cfg.workers = static_cast<unsigned>(f.workers);
  if (f.n_candidates > 0) cfg.ms.n_candidates = static_cast<std::size_t>(f.n_candidates);
  if (f.reps > 0) cfg.dgp.n_reps = static_cast<int>(f.reps);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-quantile VaR/ES forecasting toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> beta_pairs;
  long grid_points = -1;

  CLI::App* sim = app.add_subcommand("simulate", "Monte-Carlo bias study");
  add_common(sim, flags);
  sim->add_option("--reps", flags.reps, "Replication count override");

  CLI::App* fit = app.add_subcommand("fit", "Fit models on full series");
  add_common(fit, flags);
  fit->add_option("--data", flags.data, "Return CSV file(s)");
  fit->add_option("--model", flags.models, "Model descriptor(s)");

  CLI::App* bt = app.add_subcommand("backtest", "Rolling out-of-sample forecasts");
  add_common(bt, flags);
  bt->add_option("--data", flags.data, "Return CSV file(s)");
  bt->add_option("--model", flags.models, "Model descriptor(s)");

  CLI::App* mcs_cmd = app.add_subcommand("mcs", "Model confidence set from loss CSVs");
  add_common(mcs_cmd, flags);
  mcs_cmd->add_option("--loss", flags.loss_files, "Per-step loss CSV file(s)");

  CLI::App* wp = app.add_subcommand("weights-plot", "Beta weight curve data");
  add_common(wp, flags);
  wp->add_option("--beta", beta_pairs, "Shape pair a:b (repeatable)");
  wp->add_option("--grid", grid_points, "Number of grid points");

  CLI11_PARSE(app, argc, argv);

  try {
    wqes::cli::RunConfig cfg = build_config(app.get_subcommands().front()->get_name(),
                                            flags);
    if (!beta_pairs.empty())
      wqes::cli::apply_key(cfg, "beta_params",
                           [&] {
                             std::string joined;
                             for (const auto& p : beta_pairs)
                               joined += (joined.empty() ? "" : ",") + p;
                             return joined;
                           }());
    if (grid_points > 0)
      wqes::cli::apply_key(cfg, "grid_points", std::to_string(grid_points));
    wqes::cli::run(cfg);
    return 0;
  } catch (const wqes::cli::ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << '\n';
    return 1;
  } catch (const wqes::OptimizationError& e) {
    std::cerr << "error: optimization: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
