#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wqes {

// Per-step losses for K models over an aligned out-of-sample period.
struct LossMatrix {
  std::vector<std::string> models;
  std::vector<std::string> dates;   // optional step labels
  std::vector<double> values;       // row-major, n_steps x models
  std::size_t n_steps = 0;

  double at(std::size_t t, std::size_t k) const {
    return values[t * models.size() + k];
  }
};

enum class McsMethod { R, Sq };

struct McsConfig {
  double level = 0.75;          // confidence level of the retained set
  McsMethod method = McsMethod::R;
  std::size_t block_length = 0;  // 0 -> ceil(m^(1/3))
  std::size_t n_boot = 1000;
  std::uint64_t rng_seed = 0;
};

struct McsResult {
  std::vector<std::string> models;
  std::vector<double> p_values;            // monotonized elimination p-values
  std::vector<bool> in_mcs;                // p_value >= 1 - level
  std::vector<std::size_t> elimination_order;  // model indices, worst first
  std::vector<std::string> survivors;
};

// Sequential elimination with studentized loss differentials. The bootstrap
// (moving blocks of the stated length, one index set shared by all models)
// supplies both the differential variances and the null distribution of the
// test statistic: max |t_ij| for the R method, sum of t_ij^2 over pairs for
// SQ. Each round eliminates the model with the largest studentized loss
// against the average of the others; recorded p-values are monotonized, the
// last survivor gets 1. Membership is p >= 1 - level, so the surviving set
// can only shrink as the level drops. Requires at least 50 steps.
McsResult mcs(const LossMatrix& losses, const McsConfig& cfg);

}  // namespace wqes
