#include "wqes/returns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wqes {

namespace {
std::size_t tail_count(std::size_t n, double alpha) {
  if (n == 0) throw std::domain_error("empirical quantile of an empty sample");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("empirical quantile level must lie in (0,1)");
  const auto k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
  return std::min(std::max<std::size_t>(k, 1), n);
}
}  // namespace

double empirical_quantile(std::span<const double> xs, double alpha) {
  const std::size_t k = tail_count(xs.size(), alpha);
  std::vector<double> sorted(xs.begin(), xs.end());
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  return sorted[k - 1];
}

double empirical_tail_mean(std::span<const double> xs, double alpha) {
  const std::size_t k = tail_count(xs.size(), alpha);
  std::vector<double> sorted(xs.begin(), xs.end());
  std::partial_sort(sorted.begin(), sorted.begin() + k, sorted.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += sorted[i];
  return sum / static_cast<double>(k);
}

}  // namespace wqes
