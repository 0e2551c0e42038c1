#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wqes {

using Objective = std::function<double(const std::vector<double>&)>;

// Elementwise parameter bounds; entries may be +-infinity.
struct BoxConstraints {
  std::vector<double> lower;
  std::vector<double> upper;

  static BoxConstraints unbounded(std::size_t dim);
  std::size_t dim() const { return lower.size(); }
  void project(std::vector<double>& x) const;
  bool contains(const std::vector<double>& x) const;
};

struct MultiStartConfig {
  std::size_t n_candidates = 10000;
  std::size_t n_refine = 2;
  // Per-parameter sampling interval for candidate starts; empty means [0,1]
  // for every coordinate. Overrides exist for parameters whose fitted values
  // are negative (e.g. quantile-recursion intercepts).
  std::vector<std::pair<double, double>> candidate_intervals;
  std::uint64_t rng_seed = 0;
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-6;
  unsigned workers = 1;  // stage-1 candidate evaluations
};

struct LocalOptions {
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-6;
};

struct OptimDiagnostics {
  std::size_t n_evaluations = 0;
  std::size_t n_finite_candidates = 0;
  double best_candidate_value = std::numeric_limits<double>::infinity();
  std::size_t simplex_iterations = 0;
  std::size_t quasi_newton_iterations = 0;
  double gradient_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  OptimDiagnostics diagnostics;
};

struct OptimizationError : std::runtime_error {
  explicit OptimizationError(const std::string& what, OptimDiagnostics diag = {})
      : std::runtime_error(what), diagnostics(diag) {}
  OptimDiagnostics diagnostics;
};

// Derivative-free simplex descent (Nelder-Mead) with trial points projected
// onto the box. Accepted steps never increase the objective.
MinimizeResult nelder_mead(const Objective& f, std::vector<double> start,
                           const BoxConstraints& box, const LocalOptions& opts = {});

// Quasi-Newton (BFGS) descent with central-difference gradients,
// h_i = max(1e-6, 1e-6 |x_i|), and projection onto the box inside the line
// search. The returned value never exceeds f(start).
MinimizeResult minimize_local(const Objective& f, std::vector<double> start,
                              const BoxConstraints& box, const LocalOptions& opts = {});

// Two-stage multi-start: sample n_candidates starts from the per-parameter
// intervals, evaluate all of them, then refine the n_refine best by simplex
// descent followed by a quasi-Newton polish. Deterministic given rng_seed for
// any worker count: candidates are generated sequentially and ties are broken
// by candidate index. Throws OptimizationError when no candidate evaluates to
// a finite value.
MinimizeResult minimize_multistart(const Objective& f, std::size_t dim,
                                   const MultiStartConfig& cfg,
                                   const BoxConstraints& box);

}  // namespace wqes
