#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wqes/backtest.hpp"
#include "wqes/mcs.hpp"
#include "wqes/optimize.hpp"
#include "wqes/simulate.hpp"

namespace wqes::cli {

// Configuration or input problems detected before any numerical work;
// reported with exit code 1 (numerical failures exit with 2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;  // simulate | fit | backtest | mcs | weights-plot

  std::vector<std::filesystem::path> data_files;
  std::vector<std::filesystem::path> loss_files;
  std::filesystem::path out_dir = ".";

  std::vector<std::string> model_names;
  double alpha = 0.025;
  double alpha1 = 0.005;
  int care_grid = 50;

  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0 -> hardware concurrency; WQES_WORKERS overrides
  MultiStartConfig ms = desk_scale_multistart();

  // 1000 candidates instead of the reference 10000; a config key restores it.
  static MultiStartConfig desk_scale_multistart() {
    MultiStartConfig ms;
    ms.n_candidates = 1000;
    return ms;
  }

  DgpSpec dgp = desk_scale_dgp();
  std::vector<std::string> variant_names{"WQ-Beta", "WQ-EW", "WQ-UNC", "SA-BC",
                                         "SA-No-BC"};

  // 200 replications instead of the reference 1000 (n_reps restores it).
  static DgpSpec desk_scale_dgp() {
    DgpSpec dgp;
    dgp.n_reps = 200;
    return dgp;
  }
  std::vector<int> m_set{3};
  std::vector<double> alpha1_set{0.005, 0.01, 0.015};
  std::string caviar = "SAV";

  RollingConfig rolling{.in_sample_n = 1900, .out_sample_m = 400,
                        .refit_interval = 1};

  McsConfig mcs;
  std::string mcs_method = "both";  // R | SQ | both

  std::vector<std::pair<double, double>> beta_shapes;
  int grid_points = 50;
};

// Key/value config file: one `key = value` per line, `#` comments, lists
// comma-separated. Unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);

// Applies one key=value pair (config line or CLI override).
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

// Structural checks; throws ValidationError before any compute.
void validate(const RunConfig& cfg);

// Executes cfg.command, writing artifacts under cfg.out_dir.
void run(const RunConfig& cfg);

}  // namespace wqes::cli
