#include <benchmark/benchmark.h>

#include "boundstate/dirac_solver.hpp"
#include "boundstate/kernel_expansion.hpp"
#include "boundstate/schrodinger_solver.hpp"
#include "boundstate/spectral_analysis.hpp"

namespace bs = boundstate;

namespace {

struct Setup {
  bs::Grid grid;
  bs::ScalarField V;

  explicit Setup(std::size_t n) : grid(n, 0.25 * static_cast<double>(n)), V(grid) {
    V = bs::assemble(bs::PotentialSpec{{bs::Nucleus{}}}, grid);
  }
};

void BM_PowerSum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bs::build_power_sum(1.0, 1e-6, 1e-6, 1e6));
}
BENCHMARK(BM_PowerSum)->Unit(benchmark::kMillisecond);

void BM_HelmholtzSum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bs::build_helmholtz_sum(1.0, 1e-6, 1e-6, 200.0));
}
BENCHMARK(BM_HelmholtzSum)->Unit(benchmark::kMillisecond);

void BM_Transform(benchmark::State& state) {
  const bs::Grid grid(static_cast<std::size_t>(state.range(0)), 16.0);
  bs::ScalarField f = bs::sample(grid, [](double x, double y, double z) { return std::exp(-(x * x + y * y + z * z)); });
  for (auto _ : state) {
    bs::transform_in_place(f, bs::Direction::Forward);
    bs::transform_in_place(f, bs::Direction::Inverse);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_Transform)->Arg(32)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_ApplyT(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  const auto psi = bs::hydrogenic_guess(s.grid, bs::Nucleus{});
  for (auto _ : state) benchmark::DoNotOptimize(bs::apply_T(psi, 1.0, s.V));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.grid.size()));
}
BENCHMARK(BM_ApplyT)->Arg(32)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_ApplyA(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  const auto psi = bs::standard_dirac_guess(s.grid, bs::Nucleus{});
  const double kappa = bs::kappa_from_binding(-0.5);
  for (auto _ : state) benchmark::DoNotOptimize(bs::apply_A(psi, kappa, s.V));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.grid.size()));
}
BENCHMARK(BM_ApplyA)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SeparatedGreens(benchmark::State& state) {
  const bs::Grid grid(static_cast<std::size_t>(state.range(0)), 16.0);
  const auto f = bs::sample(grid, [](double x, double y, double z) { return std::exp(-(x * x + y * y + z * z)); });
  for (auto _ : state) benchmark::DoNotOptimize(bs::apply_greens_separated(f, 1.0, 1e-8));
}
BENCHMARK(BM_SeparatedGreens)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_HsNormNumeric(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bs::hs_norm_numeric(0.25, 1.0));
}
BENCHMARK(BM_HsNormNumeric)->Unit(benchmark::kMillisecond);

void BM_RadialOracle(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(bs::radial_oracle_lambda(1.0, 1.0, 40.0, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_RadialOracle)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
