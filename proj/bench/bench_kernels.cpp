#include <random>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "gcnet/nn/kernels.hpp"

using namespace gcnet::nn;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data) v = u(rng);
  return m;
}

// A 128-wide hidden layer as used by the paper-scale networks.
struct Fixture {
  Layer layer;
  Matrix in, delta;

  explicit Fixture(std::size_t batch) {
    layer.fan_in = 128;
    layer.fan_out = 128;
    layer.weights = random_matrix(128, 128, 1).data;
    layer.biases = random_matrix(1, 128, 2).data;
    in = random_matrix(batch, 128, 3);
    delta = random_matrix(batch, 128, 4);
  }
};

void set_threads(const benchmark::State& state) { omp_set_num_threads(static_cast<int>(state.range(1))); }

void BM_ForwardReference(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  Matrix pre;
  for (auto _ : state) {
    kernels::reference::dense_forward(f.in, f.layer, 30.0, pre);
    benchmark::DoNotOptimize(pre.data.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ForwardParallel(benchmark::State& state) {
  set_threads(state);
  Fixture f(static_cast<std::size_t>(state.range(0)));
  Matrix pre;
  for (auto _ : state) {
    kernels::dense_forward(f.in, f.layer, 30.0, pre);
    benchmark::DoNotOptimize(pre.data.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BackwardReference(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  Matrix gin;
  std::vector<double> gw(128 * 128), gb(128);
  for (auto _ : state) {
    kernels::reference::dense_backward(f.in, f.layer, 30.0, f.delta, gw, gb, &gin);
    benchmark::DoNotOptimize(gw.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BackwardParallel(benchmark::State& state) {
  set_threads(state);
  Fixture f(static_cast<std::size_t>(state.range(0)));
  Matrix gin;
  std::vector<double> gw(128 * 128), gb(128);
  for (auto _ : state) {
    kernels::dense_backward(f.in, f.layer, 30.0, f.delta, gw, gb, &gin);
    benchmark::DoNotOptimize(gw.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void parallel_args(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_num_procs();
  for (int batch : {256, 4096})
    for (int t = 1; t <= max_threads; t *= 2) b->Args({batch, t});
}

}  // namespace

BENCHMARK(BM_ForwardReference)->Arg(256)->Arg(4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ForwardParallel)->Apply(parallel_args)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_BackwardReference)->Arg(256)->Arg(4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BackwardParallel)->Apply(parallel_args)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
