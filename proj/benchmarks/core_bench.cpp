#include <benchmark/benchmark.h>

#include <cstdio>
#include <random>
#include <vector>

#include "ghostfilter/conflict.hpp"
#include "ghostfilter/ghost_filter.hpp"
#include "ghostfilter/seg_io.hpp"
#include "ghostfilter/synth.hpp"

using namespace ghostfilter;

namespace {

// Crossings spread over (point, fl) buckets the way the detector's budget is
// stated: n crossings over n/100 buckets.
std::vector<Crossing> bucketed_crossings(std::size_t count) {
    std::mt19937_64 rng(1);
    const std::size_t buckets = std::max<std::size_t>(1, count / 100);
    std::vector<Crossing> crossings;
    crossings.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t bucket = rng() % buckets;
        char point[24];
        std::snprintf(point, sizeof(point), "P%08zu", bucket % (buckets / 10 + 1));
        Crossing c;
        c.flight_id = "F" + std::to_string(i);
        c.point_id = point;
        c.t = static_cast<std::int64_t>(rng() % 86400);
        c.fl = 200 + static_cast<int>((bucket / (buckets / 10 + 1)) % 20) * 10;
        c.phase = Phase::Enroute;
        crossings.push_back(std::move(c));
    }
    return crossings;
}

SynthResult corpus(int flights) {
    SynthConfig cfg;
    cfg.seed = 7;
    cfg.n_flights = flights;
    return generate(cfg);
}

void BM_DetectConflicts(benchmark::State& state) {
    const auto crossings = bucketed_crossings(static_cast<std::size_t>(state.range(0)));
    const ConflictParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect_conflicts(crossings, params));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetectConflicts)->Arg(10000)->Arg(100000)->Arg(1000000)
    ->Unit(benchmark::kMillisecond);

void BM_DeriveCrossings(benchmark::State& state) {
    const auto data = corpus(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(derive_crossings(data.m3));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(data.m3.segments.size()));
}
BENCHMARK(BM_DeriveCrossings)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ParseSegmentFile(benchmark::State& state) {
    const auto data = corpus(static_cast<int>(state.range(0)));
    const std::string text = write_segment_file(data.m3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_segment_file(text));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseSegmentFile)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_WriteSegmentFile(benchmark::State& state) {
    const auto data = corpus(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(write_segment_file(data.m3));
    }
}
BENCHMARK(BM_WriteSegmentFile)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
    const auto data = corpus(static_cast<int>(state.range(0)));
    const auto deviations = compute_deviations(data.m1, data.m3);
    const auto thresholds = default_sweep_thresholds(deviations, 100);
    const SweepOptions options;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep(data.m1, data.m3, thresholds, options));
    }
}
BENCHMARK(BM_Sweep)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
    SynthConfig cfg;
    cfg.seed = 7;
    cfg.n_flights = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate(cfg));
    }
}
BENCHMARK(BM_Generate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
