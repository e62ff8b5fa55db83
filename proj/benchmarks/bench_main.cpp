#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "densctl/grid.hpp"
#include "densctl/kernels.hpp"
#include "densctl/macro_sim.hpp"
#include "densctl/micro_sim.hpp"

using namespace densctl;

namespace {

GridFunction bump(const PeriodicMesh& mesh, double mass) {
  auto f = GridFunction::sample(mesh, [](const Vec2& x) { return std::exp(std::cos(x[0]) + std::cos(x[1])); });
  return f * (mass / integral(f));
}

std::vector<Vec2> random_points(std::size_t count, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<Vec2> out(count);
  for (auto& p : out) p = {u(rng), dim == 2 ? u(rng) : 0.0};
  return out;
}

}  // namespace

static void BM_Convolve1D(benchmark::State& state) {
  const PeriodicMesh mesh(1, static_cast<int>(state.range(0)));
  auto k = materialize(KernelSpec::morse(kPi / 2, kPi, 1), mesh);
  auto rho = bump(mesh, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(circular_convolve(k, rho));
}
BENCHMARK(BM_Convolve1D)->Arg(500)->Arg(4000);

static void BM_Convolve2D(benchmark::State& state) {
  const PeriodicMesh mesh(2, static_cast<int>(state.range(0)));
  auto k = materialize(KernelSpec::morse(kPi / 2, kPi, 1, 2), mesh);
  auto rho = bump(mesh, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(circular_convolve(k, rho));
}
BENCHMARK(BM_Convolve2D)->Arg(32)->Arg(64);

static void BM_MacroStep1D(benchmark::State& state) {
  const PeriodicMesh mesh(1, static_cast<int>(state.range(0)));
  MacroRunConfig c;
  c.fl_kernel = materialize(KernelSpec::repulsive(kPi), mesh);
  c.ff_kernel = materialize(KernelSpec::morse(kPi / 2, kPi, 1), mesh);
  c.rho_F_ref = bump(mesh, 0.7);
  c.rho_L_ref = bump(mesh, 0.3);
  c.rho_F0 = GridFunction::sample(mesh, [](const Vec2&) { return 0.7 / kTwoPi; });
  c.rho_L0 = GridFunction::sample(mesh, [](const Vec2&) { return 0.3 / kTwoPi; });
  c.D = 0.02;
  MacroSimulator sim(c);
  auto s = sim.initial_state();
  for (auto _ : state) sim.step(s);
}
BENCHMARK(BM_MacroStep1D)->Arg(500)->Arg(2000);

static void BM_FollowerDrift1D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  AgentState a;
  a.leaders = random_points(n / 4, 1, 1);
  a.followers = random_points(n - n / 4, 1, 2);
  const auto fl = KernelSpec::repulsive(kPi);
  const auto ff = KernelSpec::morse(kPi / 2, kPi, 1);
  if (state.range(1) == 0) {
    const PointKernel pfl(fl), pff(ff);
    for (auto _ : state) benchmark::DoNotOptimize(follower_drift(a, pfl, pff));
  } else {
    for (auto _ : state) benchmark::DoNotOptimize(follower_drift_fast_1d(a, fl, ff));
  }
}
BENCHMARK(BM_FollowerDrift1D)->Args({500, 0})->Args({500, 1})->Args({2000, 0})->Args({2000, 1});

static void BM_Kde(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  BridgeConfig b{dim == 1 ? 50.0 : 10.0, PeriodicMesh(dim, dim == 1 ? 500 : 50)};
  auto pts = random_points(1000, dim, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kde(pts, 1.0, b));
}
BENCHMARK(BM_Kde)->Arg(1)->Arg(2);
BENCHMARK_MAIN();
