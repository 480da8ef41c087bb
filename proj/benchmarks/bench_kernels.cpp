#include <benchmark/benchmark.h>

#include <random>

#include "benchmark_problems.hpp"
#include "nchs/optimize.hpp"

using namespace nchs;

namespace {

ScalarField noise(const Grid& g) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  ScalarField f(g);
  for (auto& v : f.values()) v = d(rng);
  return f;
}

void BM_ConvScalar(benchmark::State& state) {
  const Grid g(int(state.range(0)), int(state.range(0)), 1.0, 1.0);
  const DiscreteKernel dk = DiscreteKernel::build(test::benchmark_kernel(), g);
  const ScalarField phi = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(conv_scalar(dk, phi));
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.cell_count()));
}
BENCHMARK(BM_ConvScalar)->RangeMultiplier(2)->Range(16, 128);

void BM_ConvGrad(benchmark::State& state) {
  const Grid g(int(state.range(0)), int(state.range(0)), 1.0, 1.0);
  const DiscreteKernel dk = DiscreteKernel::build(test::benchmark_kernel(), g);
  const ScalarField phi = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(conv_grad(dk, phi));
}
BENCHMARK(BM_ConvGrad)->RangeMultiplier(2)->Range(16, 128);

void BM_ChStep(benchmark::State& state) {
  const Problem p = test::stripe_benchmark(int(state.range(0)), 100);
  const VectorField u = vortex(p.model.grid(), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(ch_step(p.model, p.phi0, u, p.cfg));
}
BENCHMARK(BM_ChStep)->RangeMultiplier(2)->Range(16, 64)->Unit(benchmark::kMillisecond);

void BM_NsStep(benchmark::State& state) {
  const Problem p = test::stripe_benchmark(int(state.range(0)), 100);
  const Grid& g = p.model.grid();
  const VectorField u = vortex(g, 0.1), v = vortex(g, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ns_step(p.model, u, p.phi0, v, p.cfg));
}
BENCHMARK(BM_NsStep)->RangeMultiplier(2)->Range(16, 64)->Unit(benchmark::kMillisecond);

void BM_ReducedGradient(benchmark::State& state) {
  const test::TrackingBenchmark b = test::tracking_benchmark();
  const ControlField v = ControlField::zeros(b.problem.model.grid(), b.problem.steps());
  for (auto _ : state) benchmark::DoNotOptimize(reduced_gradient(b.problem, v, b.weights));
}
BENCHMARK(BM_ReducedGradient)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
