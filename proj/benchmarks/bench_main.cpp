#include <benchmark/benchmark.h>

#include "scramble/closures.hpp"
#include "scramble/collective.hpp"
#include "scramble/entanglement.hpp"
#include "scramble/exact_dynamics.hpp"
#include "scramble/full_ed.hpp"
#include "scramble/semiclassics.hpp"
#include "scramble/spectral.hpp"

using namespace scramble;

static void BM_LmgDiagonalize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto h = build_lmg_hamiltonian(n, 1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize_hermitian(h));
}
BENCHMARK(BM_LmgDiagonalize)->Arg(100)->Arg(400)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_SquareCommutator(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto strategy = state.range(1) ? CommutatorStrategy::VectorChain : CommutatorStrategy::Dense;
  const auto gen = diagonalize_hermitian(build_lmg_hamiltonian(n, 1.0, 2.0));
  const auto times = uniform_times(10.0, 0.1);
  const auto psi0 = DickeState::polarized_up(n);
  for (auto _ : state) benchmark::DoNotOptimize(square_commutator(psi0, gen, times, strategy));
  state.SetLabel(state.range(1) ? "vector chain" : "dense");
}
BENCHMARK(BM_SquareCommutator)
    ->Args({32, 0})->Args({32, 1})->Args({128, 0})->Args({128, 1})->Args({400, 1})
    ->Unit(benchmark::kMillisecond);

static void BM_FullPropagation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto strategy = state.range(1) ? PropagationStrategy::Chebyshev : PropagationStrategy::Dense;
  const auto h = build_longrange_hamiltonian(n, 0.5, 1.0, 0.75);
  const auto times = uniform_times(10.0, 0.5);
  const auto psi0 = FullState::polarized_up(n);
  for (auto _ : state) {
    const FullPropagator prop(h, strategy);
    benchmark::DoNotOptimize(full_evolve(psi0, prop, times));
  }
  state.SetLabel(state.range(1) ? "chebyshev" : "dense");
}
BENCHMARK(BM_FullPropagation)
    ->Args({8, 0})->Args({8, 1})->Args({10, 0})->Args({10, 1})->Args({12, 1})
    ->Unit(benchmark::kMillisecond);

static void BM_BlockEntropies(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto psi = DickeState::coherent(n, 1.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(block_entropies(psi));
}
BENCHMARK(BM_BlockEntropies)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_FloquetSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto u = build_floquet(n, 1.0, 2.0, 20.0, 1.0);
  const auto parity = build_parity(n);
  for (auto _ : state) benchmark::DoNotOptimize(level_spacing_ratio(floquet_spectrum(u, parity, 1.0), 1));
}
BENCHMARK(BM_FloquetSpectrum)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Dtwa(benchmark::State& state) {
  const int n = 50;
  const auto ensemble = dtwa_sample(n, 256, 1);
  const auto model = dtwa_all_to_all(n, 1.0, 2.0, 0.0, 1.0, 0.01);
  const auto times = uniform_times(2.0, 0.1);
  DtwaOptions opt;
  opt.species_fast_path = state.range(0) != 0;
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(dtwa_run(ensemble, model, times, opt));
  state.SetLabel(state.range(0) ? "two species" : "per site");
}
BENCHMARK(BM_Dtwa)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Closures(benchmark::State& state) {
  const auto times = uniform_times(10.0, 0.05);
  for (auto _ : state) {
    if (state.range(0))
      benchmark::DoNotOptimize(holstein_primakoff_c(200, 1.0, 2.0, 1.5707963267948966, 0.0, times, 1e-3));
    else
      benchmark::DoNotOptimize(cumulant_closure_c(200, 1.0, 2.0, BlochVector::UnitZ(), times, 1e-3));
  }
  state.SetLabel(state.range(0) ? "holstein-primakoff" : "cumulant");
}
BENCHMARK(BM_Closures)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
