#include <benchmark/benchmark.h>

#include <vector>

#include "lookahead/harness.hpp"
#include "lookahead/kernels.hpp"
#include "lookahead/rng.hpp"

using namespace lookahead;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  const CounterRng rng(seed, 0);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.normal(0, i);
  return v;
}

template <auto Kernel>
void axpby(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1), y = noise(n, 2);
  std::vector<double> out(n);
  for (auto _ : state) {
    Kernel(0.5, x, -1.5, y, out);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n * 3 * sizeof(double)));
}

template <auto Kernel>
void dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1), y = noise(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, y));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n * 2 * sizeof(double)));
}

template <auto Kernel>
void sum_squares(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n * sizeof(double)));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (std::int64_t n : {1 << 12, 1 << 16, 1 << 20, 1 << 23}) b->Arg(n);
}

RunConfig sweep_base() {
  RunConfig c;
  c.problem.dim = 200;
  c.problem.L = 100;
  c.lr.kind = "wsd";
  c.lr.peak = 0.01;
  c.wrapper.kind = "ema_nesterov";
  c.wrapper.beta.kind = "three_stage";
  c.total_T = 500;
  c.noise_sigma = 0.1;
  c.log_every = 50;
  return c;
}

void sweep_grid(benchmark::State& state) {
  const RunConfig base = sweep_base();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(base, kSweepGammas, kSweepBetas, {1, 2}, threads));
}

}  // namespace

BENCHMARK(axpby<kernels::serial::axpby>)->Name("axpby/serial")->Apply(sizes);
BENCHMARK(axpby<kernels::parallel::axpby>)->Name("axpby/parallel")->Apply(sizes);
BENCHMARK(dot<kernels::serial::dot>)->Name("dot/serial")->Apply(sizes);
BENCHMARK(dot<kernels::parallel::dot>)->Name("dot/parallel")->Apply(sizes);
BENCHMARK(sum_squares<kernels::serial::sum_squares>)->Name("sum_squares/serial")->Apply(sizes);
BENCHMARK(sum_squares<kernels::parallel::sum_squares>)->Name("sum_squares/parallel")->Apply(sizes);
BENCHMARK(sweep_grid)->Name("sweep_5x5x2")->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
