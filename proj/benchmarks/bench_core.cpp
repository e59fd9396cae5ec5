#include <benchmark/benchmark.h>

#include "hartree/cutoff.hpp"
#include "hartree/hierarchy.hpp"
#include "hartree/potentials.hpp"
#include "hartree/solver.hpp"
#include "hartree/virial.hpp"

using namespace hartree;

namespace {

GridSpec grid3(benchmark::State& st) { return GridSpec::make(3, static_cast<int>(st.range(0)), 8.0); }

void BM_StrangStep(benchmark::State& st) {
  const auto g = grid3(st);
  const ConvolutionKernel K(g, kernel_samples(Potential::power(2.2), g));
  auto phi = gaussian(g, {0.8, {}, {}});
  for (auto _ : st) {
    phi = strang_step(phi, K, 1e-3, -1);
    benchmark::DoNotOptimize(phi[0]);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_StrangStep)->Arg(32)->Arg(48)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_KernelSamples(benchmark::State& st) {
  const auto g = grid3(st);
  const auto V = Potential::power(2.2);
  for (auto _ : st) benchmark::DoNotOptimize(kernel_samples(V, g));
}
BENCHMARK(BM_KernelSamples)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Convolve(benchmark::State& st) {
  const auto g = grid3(st);
  const ConvolutionKernel K(g, kernel_samples(Potential::power(2.2), g));
  const RealField rho = density(gaussian(g, {1.0, {}, {}}));
  for (auto _ : st) benchmark::DoNotOptimize(K.apply(rho));
}
BENCHMARK(BM_Convolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LocalizedRhs(benchmark::State& st) {
  const auto g = GridSpec::make(3, static_cast<int>(st.range(0)), 16.0);
  const auto kernels = InteractionKernels::build(Potential::power(2.2), g);
  const auto e = Ensemble({{0.4, gaussian(g, {1.2, {}, {}})}, {0.6, gaussian(g, {2.0, {}, {}})}}, true);
  const auto w = weight_fields(g, make_profile(), 4.0);
  for (auto _ : st) {
    const auto a = analyze(e, kernels.value, true);
    benchmark::DoNotOptimize(localized_virial_rhs(a, w, -1));
  }
}
BENCHMARK(BM_LocalizedRhs)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_CommutatorDirect(benchmark::State& st) {
  const auto g = GridSpec::make(3, static_cast<int>(st.range(0)), 12.0);
  const auto V = Potential::power(2.2);
  const auto e = Ensemble::singleton(gaussian(g, {1.0, {}, {}}), true);
  for (auto _ : st) benchmark::DoNotOptimize(commutator_term_direct(e, V, make_profile(), 4.0));
}
BENCHMARK(BM_CommutatorDirect)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_TruncationBound(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(truncation_bound_check(make_profile(), 10.0, st.range(0), 1));
}
BENCHMARK(BM_TruncationBound)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
