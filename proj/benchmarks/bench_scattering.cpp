#include <benchmark/benchmark.h>

#include "backflow/backflow.hpp"

using namespace backflow;

static void BM_SolveNumeric(benchmark::State& state) {
    const auto v = Potential::power_law(1.0, 3.0);
    const double k = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(solve_scattering(v, k, 1.0, ScatteringMethod::Numeric));
}
BENCHMARK(BM_SolveNumeric)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_SolveSquareWellClosedForm(benchmark::State& state) {
    const auto v = Potential::square_well(-1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_scattering(v, 1.3));
}
BENCHMARK(BM_SolveSquareWellClosedForm);

static void BM_DressedMatrix(benchmark::State& state) {
    const auto grid = std::make_shared<const MomentumGrid>(make_gauss_grid(8.0, state.range(0)));
    const auto f = SmearingFunction::gaussian(0.0, 1.0);
    const auto v = Potential::square_well(-1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(build_dressed_flux_matrix(grid, f, v));
}
BENCHMARK(BM_DressedMatrix)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
