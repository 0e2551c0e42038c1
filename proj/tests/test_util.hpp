#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "wqes/returns.hpp"
#include "wqes/simulate.hpp"

namespace wqes::test {

// Composite Simpson on a fixed fine mesh; independent of the adaptive
// quadrature used inside the library.
inline double simpson_oracle(const std::function<double(double)>& f, double a,
                             double b, int n_intervals = 20000) {
  if (n_intervals % 2 != 0) ++n_intervals;
  const double h = (b - a) / n_intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < n_intervals; ++i)
    sum += f(a + h * i) * (i % 2 == 0 ? 2.0 : 4.0);
  return sum * h / 3.0;
}

// Student-t density straight from the formula (std::lgamma), bypassing the
// library's gamma and incomplete-beta code paths.
inline double t_pdf_oracle(double x, double nu) {
  const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                       0.5 * std::log(nu * 3.14159265358979323846);
  return std::exp(log_c - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

inline ReturnSeries sim_series(std::uint64_t seed, int n = 1900,
                               DgpForm form = DgpForm::AvGarchT) {
  DgpSpec spec = form == DgpForm::AvGarchT ? DgpSpec::model_1() : DgpSpec::model_2();
  spec.n = n;
  ReturnSeries out;
  out.values = simulate_with_seed(spec, seed).returns;
  return out;
}

// Draws from the asymmetric Laplace density with mode q and scale parameter
// es (< 0): mass alpha below q with exponential decay rate (1-alpha)/(-alpha es),
// mass 1-alpha above with rate -1/es.
inline double al_draw(std::mt19937_64& rng, double q, double es, double alpha) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  if (u < alpha) {
    const double c = (alpha - 1.0) / (alpha * es);  // > 0
    return q + std::log(u / alpha) / c;
  }
  return q + es * std::log((1.0 - u) / (1.0 - alpha));
}

}  // namespace wqes::test
