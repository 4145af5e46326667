#include <benchmark/benchmark.h>

#include "rsmdp/mpi.hpp"
#include "rsmdp/oracles.hpp"
#include "rsmdp/transform.hpp"

using namespace rsmdp;

namespace {

TransformedMdp bench_tmdp(int n, int na) {
    return transform(generate_random(12345, n, na, 0.0, 1.0), {1.0, 0.5});
}

MpiConfig bench_config(int m) {
    MpiConfig config;
    config.m_schedule = [m](int) { return m; };
    config.m_cap = m;
    return config;
}

}  // namespace

static void BM_Transform(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    MdpModel model = generate_random(7, n, 4, 0.0, 1.0);
    RiskParams params{1.0, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(transform(model, params));
}
BENCHMARK(BM_Transform)->Arg(8)->Arg(32)->Arg(128);

static void BM_PerronEigenpair(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    TransformedMdp tmdp = bench_tmdp(n, 2);
    DeterministicPolicy policy = policy_from_index(1, n, 2);
    WeightedTransitionMatrix m = weighted_matrix(tmdp, policy);
    for (auto _ : state) benchmark::DoNotOptimize(perron_eigenpair(m));
}
BENCHMARK(BM_PerronEigenpair)->Arg(4)->Arg(16)->Arg(64);

static void BM_RunMpi(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    TransformedMdp tmdp = bench_tmdp(n, 3);
    MpiConfig config = bench_config(5);
    PositiveValueVector init = PositiveValueVector::uniform(n);
    for (auto _ : state) benchmark::DoNotOptimize(run_mpi(tmdp, config, init));
}
BENCHMARK(BM_RunMpi)->Arg(4)->Arg(16)->Arg(64);

static void BM_BruteForce(benchmark::State& state) {
    TransformedMdp tmdp = bench_tmdp(static_cast<int>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_optimal(tmdp));
}
BENCHMARK(BM_BruteForce)->Arg(3)->Arg(5)->Arg(7);

BENCHMARK_MAIN();
