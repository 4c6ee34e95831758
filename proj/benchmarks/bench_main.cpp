#include <benchmark/benchmark.h>

#include "adahuber/dataset.hpp"
#include "adahuber/glasso.hpp"
#include "adahuber/huber.hpp"
#include "adahuber/lepski.hpp"

using namespace adahuber;

namespace {

Dataset sample(Index n, Index p) {
  SimSpec s;
  s.n = n;
  s.p = p;
  s.k = 4;
  s.error_dist = StudentTErrors{3, 0.01};
  s.seed = 11;
  return generate(s);
}

void BM_fit_huber(benchmark::State& state) {
  const Dataset d = sample(state.range(0), state.range(1));
  HuberConfig cfg;
  cfg.tau = 0.05;
  cfg.lambda = default_lambda(1.0, d.n(), d.p());
  cfg.weights = WeightSpec::identity(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_huber(d, cfg).beta.data());
}
BENCHMARK(BM_fit_huber)->Args({100, 200})->Args({400, 200})->Unit(benchmark::kMillisecond);

void BM_graphical_lasso(benchmark::State& state) {
  const Dataset d = sample(state.range(0), state.range(1));
  const CovMatrix cov = sample_cov(d);
  const double lambda = default_glasso_lambda(d.n(), d.p());
  for (auto _ : state) benchmark::DoNotOptimize(graphical_lasso(cov, lambda).theta.data());
}
BENCHMARK(BM_graphical_lasso)->Args({100, 10})->Args({100, 100})->Args({400, 200})->Unit(benchmark::kMillisecond);

void BM_adaptive_fit(benchmark::State& state) {
  const Dataset d = sample(state.range(0), state.range(1));
  LepskiConfig cfg;
  cfg.k = 4;
  cfg.fallback = true;
  cfg.huber.weights = WeightSpec::identity(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(adaptive_fit(d, cfg, MoMConfig{}).beta.data());
}
BENCHMARK(BM_adaptive_fit)->Args({100, 200})->Args({400, 200})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
