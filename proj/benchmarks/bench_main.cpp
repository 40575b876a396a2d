#include "cylsp/limit2d.hpp"
#include "cylsp/poisson.hpp"
#include "cylsp/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace cylsp;

static void BM_RingKernel(benchmark::State& st) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.1, 3);
  std::vector<double> a(1024), b(1024), c(1024);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = U(rng), b[k] = U(rng), c[k] = U(rng) - 1.5;
  std::size_t k = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(ring_kernel(a[k], b[k], c[k]));
    k = (k + 1) & 1023;
  }
}
BENCHMARK(BM_RingKernel);

static void BM_KernelMatvec(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  auto g = std::make_shared<CylGrid>(CylGrid::uniform(0, 2.0 / n, n, 2.0 / n, n, true));
  const KernelMatrix K(g);
  std::vector<double> f(g->size(), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(K.potential(f));
  st.SetComplexityN(static_cast<int64_t>(g->size()));
}
BENCHMARK(BM_KernelMatvec)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMicrosecond);

static void BM_Shooting(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(shoot_radial_ground_state(1, 1, 4).energy);
}
BENCHMARK(BM_Shooting)->Unit(benchmark::kMillisecond);

static void BM_GradJ(benchmark::State& st) {
  PenalizedProblem prob;
  prob.spec.V = PotentialField::constant(1);
  prob.spec.K = PotentialField::constant(1);
  prob.spec.rho = PotentialField::constant(1);
  prob.region = RegionLambda{2, 1, 1};
  prob.par.eps = 0.2;
  auto g = std::make_shared<CylGrid>(CylGrid::uniform(0, 0.05, 40, 0.05, 60, true));
  CylField u(g);
  for (std::size_t i = 0; i < g->ns(); ++i)
    for (std::size_t j = 0; j < g->nr(); ++j)
      u(i, j) = std::exp(-(std::pow(g->s(i), 2) + std::pow(g->r(j) - 2, 2)) / 0.1);
  for (auto _ : st) benchmark::DoNotOptimize(grad_J(prob, u));
}
BENCHMARK(BM_GradJ)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
