// Serial reference versus OpenMP simulator on the same policy.

#include <benchmark/benchmark.h>

#include "urllc/allocator.hpp"
#include "urllc/simulator.hpp"

namespace {

using namespace urllc;

struct Fixture {
    SystemConfig cfg;
    SimPolicy policy;
    Fixture() {
        std::vector<UserProfile> users;
        for (int k = 0; k < 10; ++k) users.push_back(make_user(50.0 + 20.0 * k, 20, 10.0, cfg));
        policy = make_policy(solve_allocation(cfg, users), users);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

SimOptions options(const benchmark::State& state) {
    SimOptions o;
    o.frames = static_cast<std::uint64_t>(state.range(0));
    o.streams = 8;
    o.seed = 7;
    return o;
}

void BM_SimulateSerial(benchmark::State& state) {
    const auto& f = fixture();
    const auto opts = options(state);
    for (auto _ : state) benchmark::DoNotOptimize(run_simulation_serial(f.policy, f.cfg, opts));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 10);
}

void BM_SimulateParallel(benchmark::State& state) {
    const auto& f = fixture();
    const auto opts = options(state);
    for (auto _ : state) benchmark::DoNotOptimize(run_simulation(f.policy, f.cfg, opts));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 10);
}

BENCHMARK(BM_SimulateSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SolveAllocation(benchmark::State& state) {
    SystemConfig cfg;
    std::vector<UserProfile> users;
    for (int k = 0; k < state.range(0); ++k) users.push_back(make_user(50.0 + 200.0 * k / state.range(0), 20, 10.0, cfg));
    for (auto _ : state) benchmark::DoNotOptimize(solve_allocation(cfg, users));
}

BENCHMARK(BM_SolveAllocation)->Arg(1)->Arg(10)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
