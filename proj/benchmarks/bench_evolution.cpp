#include <benchmark/benchmark.h>

#include "backflow/backflow.hpp"

using namespace backflow;

// 1000 split steps of a free packet, no diagnostics
static void BM_SplitStep(benchmark::State& state) {
    EvolutionConfig cfg;
    cfg.grid = PositionGrid(-32.0, 32.0, state.range(0));
    cfg.dt = 1e-5;
    cfg.t_max = 1000 * cfg.dt;
    cfg.sample_every = 1000;
    const auto psi0 = gaussian_packet(cfg.grid, -4.0, 2.0, 2.0);
    for (auto _ : state) split_step_evolve(psi0, cfg, [](double, std::span<const cdouble> psi) {
        benchmark::DoNotOptimize(psi.data());
    });
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SplitStep)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_Diagnostics(benchmark::State& state) {
    EvolutionConfig cfg;
    cfg.t_max = 0.1;
    cfg.dt = 1e-4;
    const auto psi0 = gaussian_packet(cfg.grid, -4.0, 2.0, 2.0);
    for (auto _ : state) {
        DiagnosticsRecorder rec(cfg.grid, 1.0, SmearingFunction::gaussian(0.0, 1.0));
        split_step_evolve(psi0, cfg, rec.observer());
        benchmark::DoNotOptimize(rec.finish());
    }
}
BENCHMARK(BM_Diagnostics)->Unit(benchmark::kMillisecond);
