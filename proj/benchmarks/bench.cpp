#include <benchmark/benchmark.h>

#include <random>

#include "coevo/study.hpp"

using namespace coevo;

namespace {

HybridMeasure random_atoms(std::mt19937_64& rng, std::size_t count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Atom> a(count);
  for (auto& x : a) x = {u(rng), u(rng)};
  return HybridMeasure(Space::circle, std::move(a));
}

void BM_bl_distance(benchmark::State& st) {
  std::mt19937_64 rng(1);
  const auto a = random_atoms(rng, 64), b = random_atoms(rng, 64);
  const auto M = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(bl_distance(a, b, M));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_bl_distance)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_integrate_coupled(benchmark::State& st) {
  auto c = default_config(Example::ring);
  c.T = 0.1;
  c.dt = 1e-3;
  const auto s = make_setup(c);
  const auto N = static_cast<std::size_t>(st.range(0));
  const auto init = finite_state(s, N);
  const auto rates = finite_rates(s, N);
  for (auto _ : st) benchmark::DoNotOptimize(integrate_coupled(init, s.model, rates, c.T, c.dt));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_integrate_coupled)->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNSquared)->Unit(benchmark::kMillisecond);

void BM_characteristic_flow(benchmark::State& st) {
  auto c = default_config(Example::dense);
  c.T_fraction = 0.5;
  c.dt = 1e-3;
  const auto s = make_setup(c);
  const auto m = static_cast<std::size_t>(st.range(0));
  const auto P = vertex_partition(s, m);
  const auto nu0 = initial_atoms(s, m, 8);
  const auto nu = MeasurePath::constant(nu0, uniform_times(static_cast<std::size_t>(std::llround(s.config.T / s.config.dt)), s.config.dt));
  const auto eta0 = eta0_dgm(s, m);
  const auto rates = finite_rates(s, m);
  for (auto _ : st) benchmark::DoNotOptimize(characteristic_flow(nu0, eta0, nu, s.model, rates, s.config.T, s.config.dt));
}
BENCHMARK(BM_characteristic_flow)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
