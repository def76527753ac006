// Serial reference vs OpenMP for the memory-kernel sums.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fracdyn/kernels.hpp"
#include "fracdyn/oscillator_exact.hpp"

using fracdyn::kernels::Exec;

namespace {

std::vector<double> signal(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(1e-3 * static_cast<double>(i)) + 1.0;
  return x;
}

template <Exec E>
void BM_FractionalIntegral(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = signal(n);
  std::vector<double> out(n);
  for (auto _ : st) {
    fracdyn::kernels::fractional_integral(x, 0.5, 1e-3, out, E);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetComplexityN(st.range(0));
}

template <Exec E>
void BM_L1Caputo(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = signal(n);
  std::vector<double> out(n);
  for (auto _ : st) {
    fracdyn::kernels::l1_caputo(x, 0.5, 1e-3, out, E);
    benchmark::DoNotOptimize(out.data());
  }
}

template <Exec E>
void BM_WeightedConvolution(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = signal(n);
  const std::vector<double> lo(n, 0.25), up(n, 0.5);
  std::vector<double> out(n);
  for (auto _ : st) {
    fracdyn::kernels::weighted_convolution(x, x, lo, up, out, E);
    benchmark::DoNotOptimize(out.data());
  }
}

template <Exec E>
void BM_ExactOscillator(benchmark::State& st) {
  const auto spec = fracdyn::OscillatorSpec::from_initial_data(2.5, 1.0, 1.0, 0.0);
  const fracdyn::Grid g = fracdyn::Grid::with_step(0.0, static_cast<double>(st.range(0)), 1.0 / 64);
  for (auto _ : st) benchmark::DoNotOptimize(fracdyn::exact_solution(spec, g, E));
}

}  // namespace

BENCHMARK(BM_FractionalIntegral<Exec::kSerial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FractionalIntegral<Exec::kParallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_L1Caputo<Exec::kSerial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_L1Caputo<Exec::kParallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WeightedConvolution<Exec::kSerial>)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightedConvolution<Exec::kParallel>)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExactOscillator<Exec::kSerial>)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactOscillator<Exec::kParallel>)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
