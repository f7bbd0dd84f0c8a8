#include <benchmark/benchmark.h>

#include <numbers>

#include "butterfly_lab/bands.hpp"
#include "butterfly_lab/butterfly.hpp"
#include "butterfly_lab/chambers.hpp"
#include "butterfly_lab/lattice.hpp"
#include "butterfly_lab/semiclassical.hpp"

using namespace butterfly_lab;

namespace {

ModelSpec model_for(int index) {
  switch (index) {
    case 0: return ModelSpec::square();
    case 1: return ModelSpec::triangular();
    case 2: return ModelSpec::hexagonal();
    default: return ModelSpec::kagome(std::numbers::pi / 8);
  }
}

// Args: model index, q (flux 1/q).
void BM_ModelEigenvalues(benchmark::State& state) {
  const ModelSpec model = model_for(static_cast<int>(state.range(0)));
  const FluxRational flux(1, state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(model_eigenvalues(model, flux, ThetaPoint{0.37, 1.13}));
}
BENCHMARK(BM_ModelEigenvalues)->ArgsProduct({{0, 1, 2, 3}, {2, 8, 32}});

void BM_ExtractChambers(benchmark::State& state) {
  const ModelSpec model = model_for(static_cast<int>(state.range(0)));
  const FluxRational flux(1, state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(extract_chambers(model, flux));
}
BENCHMARK(BM_ExtractChambers)->ArgsProduct({{0, 3}, {2, 8, 16}})->Unit(benchmark::kMillisecond);

void BM_BandsFromChambers(benchmark::State& state) {
  const ModelSpec model = model_for(static_cast<int>(state.range(0)));
  const ChambersForm form = extract_chambers(model, FluxRational(1, state.range(1)));
  const CouplingRange range = coupling_range(form);
  for (auto _ : state) benchmark::DoNotOptimize(bands_from_chambers(form, range));
}
BENCHMARK(BM_BandsFromChambers)->ArgsProduct({{0, 3}, {2, 8}})->Unit(benchmark::kMillisecond);

void BM_BandsFromGrid(benchmark::State& state) {
  const ModelSpec model = model_for(static_cast<int>(state.range(0)));
  const FluxRational flux(1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(bands_from_grid(model, flux, static_cast<int>(state.range(1)), 1));
}
BENCHMARK(BM_BandsFromGrid)->ArgsProduct({{0, 3}, {31, 101}})->Unit(benchmark::kMillisecond);

void BM_GenerateButterfly(benchmark::State& state) {
  const ModelSpec model = model_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(generate_butterfly(model, static_cast<int>(state.range(1))));
}
BENCHMARK(BM_GenerateButterfly)->ArgsProduct({{0, 1, 2, 3}, {10}})->Unit(benchmark::kMillisecond);

void BM_SubprincipalReport(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(subprincipal_report(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SubprincipalReport)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
