#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wqes/caviar.hpp"
#include "wqes/mcs.hpp"
#include "wqes/optimize.hpp"
#include "wqes/simulate.hpp"
#include "wqes/special.hpp"
#include "wqes/wq.hpp"

namespace {

wqes::ReturnSeries make_series(int n) {
  wqes::DgpSpec spec = wqes::DgpSpec::model_1();
  spec.n = n;
  wqes::ReturnSeries out;
  out.values = wqes::simulate_with_seed(spec, 42).returns;
  return out;
}

void BM_CaviarFilter(benchmark::State& state) {
  const wqes::ReturnSeries series = make_series(static_cast<int>(state.range(0)));
  const wqes::CaviarParams params{{-0.1, -0.2, 0.85}};
  for (auto _ : state) {
    auto path = wqes::caviar_filter(wqes::CaviarForm::Sav, params, series.values, -1.0);
    benchmark::DoNotOptimize(path);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CaviarFilter)->Arg(1900)->Arg(4000);

void BM_QuantileLossPath(benchmark::State& state) {
  const wqes::ReturnSeries series = make_series(1900);
  const wqes::CaviarParams params{{-0.1, -0.2, 0.85}};
  const auto path =
      wqes::caviar_filter(wqes::CaviarForm::Sav, params, series.values, -1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wqes::quantile_loss(series.values, path, 0.025));
  }
}
BENCHMARK(BM_QuantileLossPath);

void BM_AlJointLossPath(benchmark::State& state) {
  const wqes::ReturnSeries series = make_series(1900);
  const wqes::CaviarParams params{{-0.1, -0.2, 0.85}};
  const auto path =
      wqes::caviar_filter(wqes::CaviarForm::Sav, params, series.values, -1.3);
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t t = 0; t < path.size(); ++t)
      acc += wqes::al_joint_loss(series.values[t], path[t], 1.27 * path[t], 0.025);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_AlJointLossPath);

void BM_BetaWeights(benchmark::State& state) {
  for (auto _ : state) {
    auto w = wqes::weights_from_beta({0.4, 1.8},
                                     static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_BetaWeights)->Arg(11)->Arg(51);

void BM_StudentTInvCdf(benchmark::State& state) {
  const wqes::StudentTParams p{10.0};
  double prob = 0.004;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wqes::student_t_inv_cdf(prob, p));
    prob = prob < 0.03 ? prob + 0.001 : 0.004;
  }
}
BENCHMARK(BM_StudentTInvCdf);

void BM_SimulatePath(benchmark::State& state) {
  const wqes::DgpSpec spec = wqes::DgpSpec::model_1();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wqes::simulate_with_seed(spec, seed++));
  }
  state.SetItemsProcessed(state.iterations() * spec.n);
}
BENCHMARK(BM_SimulatePath);

void BM_MultiStartQuadratic(benchmark::State& state) {
  const wqes::Objective f = [](const std::vector<double>& x) {
    return (x[0] - 0.3) * (x[0] - 0.3) + (x[1] - 0.7) * (x[1] - 0.7);
  };
  wqes::MultiStartConfig cfg;
  cfg.n_candidates = static_cast<std::size_t>(state.range(0));
  cfg.rng_seed = 3;
  wqes::BoxConstraints box;
  box.lower = {0.0, 0.0};
  box.upper = {1.0, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wqes::minimize_multistart(f, 2, cfg, box));
  }
}
BENCHMARK(BM_MultiStartQuadratic)->Arg(1000)->Arg(10000);

void BM_Mcs(benchmark::State& state) {
  const std::size_t m = 400, k = static_cast<std::size_t>(state.range(0));
  wqes::LossMatrix lm;
  lm.n_steps = m;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t j = 0; j < k; ++j) lm.models.push_back("m" + std::to_string(j));
  lm.values.resize(m * k);
  for (double& v : lm.values) v = normal(rng);
  wqes::McsConfig cfg;
  cfg.n_boot = 500;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wqes::mcs(lm, cfg));
  }
}
BENCHMARK(BM_Mcs)->Arg(5)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
