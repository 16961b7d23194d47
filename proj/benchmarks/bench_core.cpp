#include <benchmark/benchmark.h>

#include <stochmech/stochmech.hpp>

using namespace stochmech;

namespace {

GridSpec grid_with(std::size_t n_x, std::size_t n_t = 256) {
  GridSpec g;
  g.n_x = n_x;
  g.n_t = n_t;
  return g;
}

void BM_FreePropagate(benchmark::State& state) {
  const auto grid = grid_with(static_cast<std::size_t>(state.range(0)));
  std::vector<std::complex<double>> psi0(grid.n_x);
  for (std::size_t k = 0; k < grid.n_x; ++k) psi0[k] = gaussian_packet_value({}, grid.x(k), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(free_propagate(psi0, grid));
}
BENCHMARK(BM_FreePropagate)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const auto psi = gaussian_packet({}, grid_with(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(psi));
}
BENCHMARK(BM_Decompose)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);

void BM_QuantumAction(benchmark::State& state) {
  const auto couple = decompose(gaussian_packet({}, grid_with(static_cast<std::size_t>(state.range(0))))).couple;
  for (auto _ : state) benchmark::DoNotOptimize(quantum_action(couple));
}
BENCHMARK(BM_QuantumAction)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);

void BM_SimulateEnsemble(benchmark::State& state) {
  const auto couple = decompose(gaussian_packet({}, grid_with(512))).couple;
  const auto b = drift(couple);
  SimulationParams p;
  p.N = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble(b, couple.rho().slice(0), p));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SimulateEnsemble)->RangeMultiplier(10)->Range(100, 10000)->Unit(benchmark::kMillisecond);

void BM_CompetitorProfile(benchmark::State& state) {
  const auto base = decompose(gaussian_packet({}, grid_with(512))).couple;
  const CompetitorFamily family(base, build_perturbation({}, base), CompetitorFamily::default_y_grid());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_family(family));
}
BENCHMARK(BM_CompetitorProfile)->Unit(benchmark::kMillisecond);

void BM_MongeMap(benchmark::State& state) {
  const auto grid = grid_with(static_cast<std::size_t>(state.range(0)));
  std::vector<double> r0(grid.n_x), r1(grid.n_x);
  for (std::size_t k = 0; k < grid.n_x; ++k) {
    r0[k] = GaussianMeasure{-0.5, 0.8}.density(grid.x(k));
    r1[k] = GaussianMeasure{1.0, 1.4}.density(grid.x(k));
  }
  for (auto _ : state) benchmark::DoNotOptimize(monge_map_1d(r0, r1, grid));
}
BENCHMARK(BM_MongeMap)->RangeMultiplier(2)->Range(256, 4096);

}  // namespace

BENCHMARK_MAIN();
