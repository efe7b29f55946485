#include <benchmark/benchmark.h>

#include <algorithm>

#include "avate/confseq.hpp"
#include "avate/experiment.hpp"
#include "avate/regression.hpp"
#include "avate/rng.hpp"

using namespace avate;

static void HedgedUpdate(benchmark::State& state) {
    HedgedCs::Options opt;
    opt.t_min = 1;
    opt.grid_size = static_cast<int>(state.range(0));
    HedgedCs cs(opt);
    Rng rng(1, 0);
    double k = 2.0;
    for (auto _ : state) {
        cs.update(rng.uniform(-k, k), k);
        k = std::min(k / 0.999, 50.0);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(HedgedUpdate)->Arg(250)->Arg(1000);

static void PrPiUpdate(benchmark::State& state) {
    PrPiCs cs(ConfSeqOptions{0.05, 1});
    Rng rng(2, 0);
    double k = 2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cs.update(rng.uniform(-k, k), k));
        k = std::min(k / 0.999, 50.0);
    }
}
BENCHMARK(PrPiUpdate);

static void KnnPredict(benchmark::State& state) {
    RegressionConfig cfg;
    cfg.warmup = 0;
    SplitRegressor reg(cfg, 3);
    Rng rng(3, 0);
    const std::int64_t n = state.range(0);
    for (std::int64_t t = 1; t <= n; ++t) {
        reg.assign_fold(t, rng);
        reg.update(Observation{t, {rng.normal(), rng.normal(), rng.normal()},
                               rng.bernoulli(0.5) ? 1 : 0, rng.uniform()});
    }
    std::vector<double> x{0.1, -0.3, 0.7};
    for (auto _ : state) {
        benchmark::DoNotOptimize(reg.predict_for_policy(x, 1, n + 1));
    }
    state.SetComplexityN(n);
}
BENCHMARK(KnnPredict)->Range(512, 4096)->Complexity();

static void FullIteration(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.dgp = DgpConfig{DgpConfig::Kind::Bernoulli, 0.1};
    cfg.horizon = state.range(0);
    cfg.n_iters = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_experiment(cfg, 0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(FullIteration)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
