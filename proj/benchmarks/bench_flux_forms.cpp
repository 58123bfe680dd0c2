#include <benchmark/benchmark.h>

#include <random>

#include "backflow/backflow.hpp"

using namespace backflow;

static void BM_BuildFluxMatrix(benchmark::State& state) {
    const auto grid = std::make_shared<const MomentumGrid>(make_gauss_grid(8.0, state.range(0)));
    const auto f = SmearingFunction::gaussian(0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(build_flux_matrix(grid, f));
}
BENCHMARK(BM_BuildFluxMatrix)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_LowestEigenpair(benchmark::State& state) {
    const auto a = build_flux_matrix(make_gauss_grid(8.0, state.range(0)), SmearingFunction::gaussian(0.0, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(lowest_eigenpair(a));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LowestEigenpair)->RangeMultiplier(2)->Range(50, 400)->Complexity(benchmark::oNCubed)
    ->Unit(benchmark::kMillisecond);

static void BM_FullEigensystem(benchmark::State& state) {
    const std::size_t n = state.range(0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = g(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            a(i, j) = cdouble(g(rng), g(rng));
            a(j, i) = std::conj(a(i, j));
        }
    }
    for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigensystem(a));
}
BENCHMARK(BM_FullEigensystem)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
