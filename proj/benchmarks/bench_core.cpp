#include <benchmark/benchmark.h>

#include "laneemden/channels.hpp"
#include "laneemden/identities.hpp"
#include "laneemden/spectral.hpp"

using namespace laneemden;

namespace {

// N = 4 gives the bubble (p = q = 3), anything else the sub-Serrin point N = 5, p = 1
const GroundStateProfile& profile(int N) {
  static const GroundStateProfile bubble = solve_ground_state(pair_from_text(4, "3"));
  static const GroundStateProfile sub = solve_ground_state(pair_from_text(5, "1"));
  return N == 4 ? bubble : sub;
}

void BM_PairFromText(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(pair_from_text(5, "11/4"));
}
BENCHMARK(BM_PairFromText);

void BM_SolveGroundState(benchmark::State& st) {
  const CriticalPair pair = st.range(0) == 4 ? pair_from_text(4, "3") : pair_from_text(5, "1");
  for (auto _ : st) benchmark::DoNotOptimize(solve_ground_state(pair));
}
BENCHMARK(BM_SolveGroundState)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_KernelNullityShooting(benchmark::State& st) {
  const GroundStateProfile& P = profile(5);
  for (auto _ : st) benchmark::DoNotOptimize(kernel_nullity_shooting(P, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_KernelNullityShooting)->Arg(0)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_GreenMatrix(benchmark::State& st) {
  const SpectralGrid g = SpectralGrid::build(4, 10, static_cast<int>(st.range(0)) / 8 - 10, 8);
  for (auto _ : st) benchmark::DoNotOptimize(green_matrix(g, 2));
}
BENCHMARK(BM_GreenMatrix)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_ChannelSpectrum(benchmark::State& st) {
  const GroundStateProfile& P = profile(4);
  const SpectralGrid g = SpectralGrid::build(4);
  for (auto _ : st) benchmark::DoNotOptimize(channel_spectrum(P, 0, g, 0.05, false));
}
BENCHMARK(BM_ChannelSpectrum)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_SobolevQuotient(benchmark::State& st) {
  const GroundStateProfile& P = profile(5);
  for (auto _ : st) benchmark::DoNotOptimize(sobolev_quotient(P));
}
BENCHMARK(BM_SobolevQuotient)->Unit(benchmark::kMillisecond);

void BM_PohozaevIdentity(benchmark::State& st) {
  const GroundStateProfile& P = profile(4);
  const ChannelSolution s = integrate_linearized(P, 2, 1.0, 0.0);
  for (auto _ : st) benchmark::DoNotOptimize(check_poho_identity(P, s, {1.0, 5.0, 20.0}));
}
BENCHMARK(BM_PohozaevIdentity)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
