#include <benchmark/benchmark.h>

#include "grj/cointegration.hpp"
#include "grj/models.hpp"
#include "grj/simkit.hpp"

using namespace grj;

namespace {

const Tolerance kTol{};

void BM_ContourCoefficient(benchmark::State& state) {
  const CompanionPencil cp = linearize(model_c0(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(contour_coefficient(cp, -1, 0.5, 256, kTol));
}
BENCHMARK(BM_ContourCoefficient)->Arg(8)->Arg(16)->Arg(32);

void BM_PoleOrder(benchmark::State& state) {
  const CompanionPencil cp = linearize(model_volterra(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(pole_order(cp, kTol));
}
BENCHMARK(BM_PoleOrder)->Arg(4)->Arg(8)->Arg(16);

void BM_I2Components(benchmark::State& state) {
  const CompanionPencil cp = linearize(model_c0(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(i2_components(cp, 20, kTol));
}
BENCHMARK(BM_I2Components)->Arg(8)->Arg(16);

void BM_SimulatePath(benchmark::State& state) {
  const BuiltinModel m = builtin_model("fx-ar3-i1");
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ar(m.ar, m.cov, static_cast<std::size_t>(state.range(0)), 1));
}
BENCHMARK(BM_SimulatePath)->Arg(500)->Arg(2000);

void BM_SimulateEnsemble(benchmark::State& state) {
  const BuiltinModel m = builtin_model("fx-ar2-i1");
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble(m.ar, m.cov, 2000, 1, 200, threads));
}
BENCHMARK(BM_SimulateEnsemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
