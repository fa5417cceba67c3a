#include "ebwlan/capacity.hpp"
#include "ebwlan/sim.hpp"
#include "ebwlan/vacation_queue.hpp"

#include <benchmark/benchmark.h>

using namespace ebwlan;

namespace {

const SlotTimes kUnit{1.0, 1.0, 1.0};

NetworkConfig aloha(int n, int m = 1) {
    NetworkConfig c;
    c.n_stations = n;
    c.mpr_capability = m;
    c.payload_bits = 1.0;
    return c;
}

void BM_SolveSaturation(benchmark::State& state) {
    const NetworkConfig cfg = aloha(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_saturation(cfg, kUnit));
}
BENCHMARK(BM_SolveSaturation)->Arg(50)->Arg(1000);

void BM_ServiceMoments(benchmark::State& state) {
    const NetworkConfig cfg = aloha(50);
    const SlotProbabilities pb{0.6, 0.1, 0.3, SlotView::BackoffView};
    const BackoffConstants c = backoff_constants(pb, kUnit);
    for (auto _ : state) benchmark::DoNotOptimize(service_moments(0.1, c, kUnit, cfg));
}
BENCHMARK(BM_ServiceMoments);

void BM_ServiceTransform(benchmark::State& state) {
    const NetworkConfig cfg = aloha(50);
    const SlotProbabilities pb{0.6, 0.1, 0.3, SlotView::BackoffView};
    for (auto _ : state)
        benchmark::DoNotOptimize(service_transform(0.05, 0.1, pb, kUnit, cfg));
}
BENCHMARK(BM_ServiceTransform);

void BM_CapacityReport(benchmark::State& state) {
    const NetworkConfig cfg = aloha(50);
    for (auto _ : state) benchmark::DoNotOptimize(capacity_report(cfg, kUnit));
}
BENCHMARK(BM_CapacityReport);

void BM_OptimalBackoff(benchmark::State& state) {
    const PhyParams phy = unit_phy();
    for (auto _ : state)
        benchmark::DoNotOptimize(optimal_backoff_factor(static_cast<int>(state.range(0)),
                                                        AccessMode::SlottedAloha, phy, 1.0,
                                                        CapacityTarget::SBMD));
}
BENCHMARK(BM_OptimalBackoff)->Arg(4);

void BM_SimulatorSlots(benchmark::State& state) {
    SimConfig cfg;
    cfg.net = aloha(static_cast<int>(state.range(0)));
    cfg.net.arrival_rate = 0.004;
    cfg.st = kUnit;
    cfg.duration_s = 20000.0;
    cfg.seed = 5;
    std::uint64_t slots = 0;
    for (auto _ : state) {
        const SimStats s = run_simulation(cfg);
        slots += s.total_slots;
        ++cfg.seed;
        benchmark::DoNotOptimize(s.delivered);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(slots));
}
BENCHMARK(BM_SimulatorSlots)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
