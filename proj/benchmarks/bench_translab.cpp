#include <benchmark/benchmark.h>

#include "translab/averaging.hpp"
#include "translab/potential.hpp"
#include "translab/regularity.hpp"

using namespace translab;

namespace {

void BM_GreenKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Vec3 x = make_point(0.1, n == 3 ? -0.2 : 0.0, 0.3), y = make_point(-0.4, n == 3 ? 0.1 : 0.0, -0.05);
  for (auto _ : state) benchmark::DoNotOptimize(green_ball(x, y, n));
}
BENCHMARK(BM_GreenKernel)->Arg(2)->Arg(3);

void BM_SingleLayerValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto u = single_layer_solve(make_test_interface(n, "sinusoid", {{"amp", 0.05}, {"freq", 2.0}}),
                                    DensityField::constant(1.0));
  const Vec3 x = make_point(0.2, 0.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(u.value(x));
}
BENCHMARK(BM_SingleLayerValue)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_BallAverage(benchmark::State& state) {
  const auto u = single_layer_solve(make_test_interface(2, "flat"), DensityField::constant(1.0));
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ball_average(u, make_point2(0.1, 0.03), 0.1, order));
}
BENCHMARK(BM_BallAverage)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_FitPolynomials(benchmark::State& state) {
  const auto u = single_layer_solve(make_test_interface(2, "flat"), DensityField::constant(1.0));
  FitOptions o;
  o.depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_polynomials(u, o));
}
BENCHMARK(BM_FitPolynomials)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
