// Serial reference kernels against their OpenMP and FFT counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "trigshape/construction.hpp"
#include "trigshape/fourier.hpp"
#include "trigshape/smoothness.hpp"

using namespace trigshape;

namespace {

TrigPoly random_poly(int degree) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(degree) + 1), b(static_cast<std::size_t>(degree));
  for (double& v : a) v = d(rng);
  for (double& v : b) v = d(rng);
  return TrigPoly(a, b);
}

const CounterexampleFunction& f_nb() {
  static const CounterexampleFunction f = build_f(TruncationParams::from_n(2, 200, 0.1), make_equidistant(2));
  return f;
}

template <std::vector<double> (*Kernel)(const TrigPoly&, std::size_t, double)>
void grid(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  const TrigPoly p = random_poly(degree);
  const std::size_t n = 16 * static_cast<std::size_t>(degree);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(p, n, -kPi));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

void modulus_serial_bench(benchmark::State& state) {
  const PeriodicFunction f = f_nb().as_function();
  for (auto _ : state) benchmark::DoNotOptimize(modulus_serial(f, 4, kPi / 200));
}

void modulus_parallel_bench(benchmark::State& state) {
  const PeriodicFunction f = f_nb().as_function();
  for (auto _ : state) benchmark::DoNotOptimize(modulus(f, 4, kPi / 200));
}

// max |f - T| over a fine grid, T evaluated by the given kernel.
template <std::vector<double> (*Kernel)(const TrigPoly&, std::size_t, double)>
void sup_scan(benchmark::State& state) {
  const CounterexampleFunction& cf = f_nb();
  const std::size_t n = 256 * static_cast<std::size_t>(cf.params().nu);
  for (auto _ : state) {
    const std::vector<double> v = Kernel(cf.T(), n, -kPi);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      m = std::max(m, std::abs(v[i] - cf.f(-kPi + kTwoPi * static_cast<double>(i) / static_cast<double>(n))));
    }
    benchmark::DoNotOptimize(m);
  }
}

}  // namespace

BENCHMARK(grid<fourier::evaluate_grid_serial>)->Name("grid/serial")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(grid<fourier::evaluate_grid_parallel>)->Name("grid/openmp")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(grid<fourier::evaluate_grid_fft>)->Name("grid/fft")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(modulus_serial_bench)->Name("modulus4/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(modulus_parallel_bench)->Name("modulus4/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(sup_scan<fourier::evaluate_grid_serial>)->Name("sup_scan/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(sup_scan<fourier::evaluate_grid_parallel>)->Name("sup_scan/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(sup_scan<fourier::evaluate_grid_fft>)->Name("sup_scan/fft")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
