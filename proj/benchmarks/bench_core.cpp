#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ruinvest/analytic.hpp"
#include "ruinvest/estimate.hpp"
#include "ruinvest/model.hpp"
#include "ruinvest/pathsim.hpp"
#include "ruinvest/rng.hpp"

using namespace ruinvest;

namespace {

ModelSpec reference_model() {
    ModelSpec spec;
    spec.regimes.a0 = 1.0;
    spec.regimes.a1 = 2.0;
    spec.regimes.sigma0 = 1.0;
    spec.regimes.sigma1 = 1.0;
    spec.regimes.lambda01 = 1.0;
    spec.regimes.lambda10 = 1.0;
    spec.claims.premium_rate = 1.2;
    spec.claims.alpha1 = 1.0;
    spec.claims.f1 = ClaimDist::exponential(1.0);
    spec.claims.alpha2 = 0.0;
    return spec;
}

void BM_SolveBeta(benchmark::State& state) {
    const auto reg = reference_model().regimes;
    for (auto _ : state) {
        auto sol = solve_beta(reg);
        benchmark::DoNotOptimize(sol.beta);
    }
}
BENCHMARK(BM_SolveBeta);

void BM_RngNormal(benchmark::State& state) {
    RngStream rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(rng.next_normal());
}
BENCHMARK(BM_RngNormal);

void BM_SampleCycle(benchmark::State& state) {
    const auto spec = reference_model();
    const double h = 1.0 / static_cast<double>(state.range(0));
    std::uint64_t i = 0;
    for (auto _ : state) {
        RngStream rng(42, i++);
        auto cs = sample_cycle(rng, spec, h);
        benchmark::DoNotOptimize(cs.q);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleCycle)->Arg(50)->Arg(100)->Arg(200);

void BM_Perpetuity(benchmark::State& state) {
    const auto spec = reference_model();
    SimConfig cfg;
    std::uint64_t i = 0;
    for (auto _ : state) {
        RngStream rng(43, i++);
        auto ps = sample_y_infinity(rng, spec, cfg);
        benchmark::DoNotOptimize(ps.y_inf);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Perpetuity);

void BM_PathBatch(benchmark::State& state) {
    const auto spec = reference_model();
    SimConfig cfg;
    cfg.n_paths = 1'000;
    cfg.workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        auto out = sample_paths(spec, cfg, 7, 0);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_paths);
}
// Worker threads are spawned inside sample_paths, so main-thread CPU time is
// meaningless here; wall clock is the relevant metric.
BENCHMARK(BM_PathBatch)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

void BM_HillEstimate(benchmark::State& state) {
    RngStream rng(5, 0);
    std::vector<double> xs(100'000);
    for (auto& x : xs) x = std::pow(rng.next_uniform(), -1.0 / 1.6);
    for (auto _ : state) {
        auto h = hill_estimate(xs);
        benchmark::DoNotOptimize(h.beta);
    }
}
BENCHMARK(BM_HillEstimate);

}  // namespace

BENCHMARK_MAIN();
