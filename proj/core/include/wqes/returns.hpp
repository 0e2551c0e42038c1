#pragma once

#include <span>
#include <string>
#include <vector>

namespace wqes {

// Ordered daily log-returns in percent units. Date labels are optional; when
// present they have one entry per observation, in ascending order.
struct ReturnSeries {
  std::vector<double> values;
  std::vector<std::string> dates;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

// Lower empirical quantile: the k-th smallest with k = ceil(alpha * n),
// clamped to [1, n].
double empirical_quantile(std::span<const double> xs, double alpha);

// Mean of the k = ceil(alpha * n) smallest observations.
double empirical_tail_mean(std::span<const double> xs, double alpha);

}  // namespace wqes
