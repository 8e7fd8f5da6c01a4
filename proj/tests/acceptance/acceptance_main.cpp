// Acceptance suite. Each criterion prints one PASS/FAIL line; the process
// exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ghostfilter/conflict.hpp"
#include "ghostfilter/errors.hpp"
#include "ghostfilter/ghost_filter.hpp"
#include "ghostfilter/seg_io.hpp"
#include "ghostfilter/stats.hpp"
#include "ghostfilter/synth.hpp"

namespace fs = std::filesystem;
using namespace ghostfilter;

namespace {

struct Failure {
    std::string message;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw Failure{message};
}

/// The 5 000-flight seed-7 run shared by several criteria.
struct ReferenceRun {
    SynthConfig config;
    SynthResult data;
    std::vector<DeviationRecord> deviations;
    std::vector<SweepPoint> sweep_points;
    ThresholdEstimate estimate;
    double elapsed_s = 0.0;
};

const ReferenceRun& reference_run() {
    static const ReferenceRun run = [] {
        ReferenceRun r;
        r.config.seed = 7;
        r.config.n_flights = 5000;

        const auto start = std::chrono::steady_clock::now();
        r.data = generate(r.config);
        r.deviations = compute_deviations(r.data.m1, r.data.m3);
        const auto thresholds = default_sweep_thresholds(r.deviations, 100);
        r.sweep_points = sweep(r.data.m1, r.data.m3, thresholds, SweepOptions{});
        r.estimate =
            estimate_threshold(r.sweep_points, EstimatorMethod::FirstBelowEpsilon, 0.0);
        r.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        return r;
    }();
    return run;
}

// 1. Planted threshold of 2000 s recovered from a 100 s sweep in under 10 s.
void criterion_threshold_recovery() {
    const ReferenceRun& run = reference_run();
    require(std::llabs(run.estimate.delta_t_s - 2000) <= 100,
            "estimate " + std::to_string(run.estimate.delta_t_s) + " not within one step of 2000");
    require(run.estimate.delta_t_s == 2000,
            "estimate " + std::to_string(run.estimate.delta_t_s) + " != 2000");
    require(run.elapsed_s < 10.0,
            "generate+sweep+estimate took " + std::to_string(run.elapsed_s) + " s");
}

// 2. Conflict pairs after filtering at the estimate <= pairs before / 100.
void criterion_two_orders() {
    const ReferenceRun& run = reference_run();
    const auto before = detect_conflicts(derive_crossings(run.data.m3), ConflictParams{});
    const auto report = filtered_conflict_report(run.data.m1, run.data.m3,
                                                 run.estimate.delta_t_s, ConflictParams{});
    require(!before.empty(), "no conflicts before filtering");
    require(report.pairs.size() * 100 <= before.size(),
            std::to_string(report.pairs.size()) + " pairs after vs " +
                std::to_string(before.size()) + " before");
}

// 3. Indexed detector equals the brute-force oracle on randomized instances.
void criterion_oracle_equivalence() {
    std::mt19937_64 rng(4242);
    static const Phase kPhases[] = {Phase::Climb, Phase::Enroute, Phase::Descent};
    static const int kLevels[] = {150, 190, 200, 210, 350, 360};
    for (int instance = 0; instance < 100; ++instance) {
        const std::size_t count = 50 + rng() % 451;  // up to 500 crossings
        std::vector<Crossing> crossings;
        std::set<std::tuple<std::string, std::string, std::int64_t>> used;
        while (crossings.size() < count) {
            Crossing c;
            c.flight_id = "F" + std::to_string(rng() % 60);
            c.point_id = "P" + std::to_string(rng() % 15);
            c.t = static_cast<std::int64_t>(rng() % 4000);
            c.fl = kLevels[rng() % 6];
            c.phase = kPhases[rng() % 3];
            if (used.emplace(c.flight_id, c.point_id, c.t).second) {
                crossings.push_back(std::move(c));
            }
        }
        ConflictParams params;
        params.max_separation_s = 30 + static_cast<std::int64_t>(rng() % 180);
        const auto fast = detect_conflicts(crossings, params);
        const auto oracle = detect_conflicts_bruteforce(crossings, params);
        require(fast == oracle,
                "mismatch on instance " + std::to_string(instance) + " (" +
                    std::to_string(fast.size()) + " vs " + std::to_string(oracle.size()) +
                    " pairs)");
    }
}

// 4. Kept counts and conflict counts never increase along a sweep, and the
//    filter keeps exactly the passing segments, over 1000+ random samples.
void criterion_monotonicity() {
    std::mt19937_64 rng(99);
    std::size_t samples = 0;
    for (int round = 0; round < 20; ++round) {
        SynthConfig cfg;
        cfg.seed = 9000 + static_cast<std::uint64_t>(round);
        cfg.n_flights = 120;
        const auto data = generate(cfg);
        const auto deviations = compute_deviations(data.m1, data.m3);

        std::vector<std::int64_t> thresholds;
        for (std::int64_t t = 0; t <= 5000; t += 100) thresholds.push_back(t);
        const auto points = sweep(data.m1, data.m3, thresholds, SweepOptions{});
        for (std::size_t i = 1; i < points.size(); ++i) {
            require(points[i].kept_segments <= points[i - 1].kept_segments,
                    "kept_segments increased at threshold " +
                        std::to_string(points[i].threshold_s));
            require(points[i].n_los <= points[i - 1].n_los,
                    "n_los increased at threshold " + std::to_string(points[i].threshold_s));
        }

        std::map<std::tuple<std::string, std::string, std::int64_t>, const DeviationRecord*>
            index;
        for (const auto& record : deviations) {
            index[{record.flight_id, record.point_id, record.t_m3}] = &record;
        }
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            const std::int64_t threshold =
                static_cast<std::int64_t>(rng() % 7000);  // off-grid samples too
            const auto kept = filter_at(data.m3, deviations, threshold);
            std::set<std::tuple<std::string, std::string, std::int64_t>> kept_keys;
            for (const Segment& s : kept.segments) {
                kept_keys.emplace(s.flight_id, s.begin_point_id, s.t_begin);
            }
            for (const Segment& s : data.m3.segments) {
                const auto key = std::make_tuple(s.flight_id, s.begin_point_id, s.t_begin);
                const bool passes = index.at(key)->passes(threshold);
                require(passes == kept_keys.contains(key),
                        "filter soundness violated for flight " + s.flight_id + " at " +
                            std::to_string(threshold));
            }
            ++samples;
        }
    }
    require(samples >= 1000, "only " + std::to_string(samples) + " samples");
}

// 5. Every emitted density equals the exact rational n/s^2 to under 1 ulp.
void criterion_density_exactness() {
    const ReferenceRun& run = reference_run();
    const std::string csv = sweep_csv(run.sweep_points);

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    std::size_t checked = 0;
    for (const SweepPoint& point : run.sweep_points) {
        require(static_cast<bool>(std::getline(lines, line)), "csv shorter than the sweep");
        const std::string field = line.substr(line.rfind(',') + 1);
        if (!point.density.has_value()) {
            require(field.empty(), "expected empty density field");
            continue;
        }
        const double emitted = std::strtod(field.c_str(), nullptr);
        // IEEE division of exact integers is correctly rounded, so the
        // emitted value must equal it bit for bit (< 0.5 ulp from the
        // rational) after the round-trip through text.
        const double s = static_cast<double>(point.kept_segments);
        const double exact_quotient = static_cast<double>(point.n_los) / (s * s);
        require(emitted == exact_quotient, "density differs from n/s^2 at threshold " +
                                               std::to_string(point.threshold_s));
        const long double rational = static_cast<long double>(point.n_los) /
                                     (static_cast<long double>(point.kept_segments) *
                                      static_cast<long double>(point.kept_segments));
        const long double ulp =
            static_cast<long double>(std::nextafter(exact_quotient, 1e300) - exact_quotient);
        require(fabsl(static_cast<long double>(emitted) - rational) < std::max(ulp, 1e-300L),
                "density further than 1 ulp from the rational");
        ++checked;
    }
    require(checked > 0, "no defined densities checked");
}

// 6. Write/parse canonicalization is idempotent on 50 generated files.
void criterion_round_trip() {
    std::mt19937_64 rng(7777);
    std::size_t files = 0;
    for (int i = 0; i < 25; ++i) {
        SynthConfig cfg;
        cfg.seed = 40000 + static_cast<std::uint64_t>(i);
        cfg.n_flights = 8 + static_cast<int>(rng() % 60);
        const auto data = generate(cfg);
        for (const TrajectoryDataset* d : {&data.m1, &data.m3}) {
            const std::string once = write_segment_file(*d);
            const std::string twice = write_segment_file(parse_segment_file(once));
            require(once == twice, "canonicalization not idempotent");
            require(parse_segment_file(once) == *d, "parse(write(d)) != d");
            ++files;
        }
    }
    require(files == 50, "expected 50 files");
}

// 7. Histogram conservation, exact grid coarsening, quantile oracle, and the
//    planted 80%-below-120 s quantile at n >= 100 000.
void criterion_statistics() {
    SynthConfig cfg;
    cfg.seed = 123;
    cfg.n_flights = 20000;
    const auto data = generate(cfg);
    require(data.m1.segments.size() >= 100000, "corpus smaller than 100k segments");

    const std::int64_t edges[] = {30, 60, 120, 240, 960};
    const Histogram h = duration_histogram(data.m1, edges);
    require(h.total() == data.m1.segments.size(), "histogram mass not conserved");

    const SpatialGrid coarse = spatial_grid(data.m1, 1.0);
    const SpatialGrid fine = spatial_grid(data.m1, 0.1);
    std::map<std::pair<std::int64_t, std::int64_t>, GridCell> aggregated;
    auto parent = [](std::int64_t idx) { return idx >= 0 ? idx / 10 : (idx - 9) / 10; };
    for (const auto& [index, cell] : fine.cells) {
        auto& up = aggregated[{parent(index.first), parent(index.second)}];
        up.duration_sum_s += cell.duration_sum_s;
        up.segment_count += cell.segment_count;
    }
    require(aggregated.size() == coarse.cells.size(), "coarsening cell sets differ");
    for (const auto& [index, cell] : coarse.cells) {
        const GridCell& up = aggregated.at(index);
        require(cell.duration_sum_s == up.duration_sum_s &&
                    cell.segment_count == up.segment_count,
                "coarse cell does not aggregate its sub-cells exactly");
        require(cell.mean_duration_s() == static_cast<double>(up.duration_sum_s) /
                                              static_cast<double>(up.segment_count),
                "coarse mean is not the count-weighted sub-cell mean");
    }

    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        std::vector<Segment> segments;
        const std::size_t count = 1 + rng() % 25;
        for (std::size_t k = 0; k < count; ++k) {
            Segment s;
            s.flight_id = "F" + std::to_string(k);
            s.begin_point_id = "A" + std::to_string(k);
            s.end_point_id = "B" + std::to_string(k);
            s.aircraft_type = "A320";
            s.origin = "AAAA";
            s.destination = "BBBB";
            s.t_begin = 0;
            s.t_end = static_cast<std::int64_t>(rng() % 400);
            segments.push_back(std::move(s));
        }
        const auto d = make_dataset(DatasetKind::M3, Date{2011, 6, 1}, std::move(segments));
        const std::int64_t threshold = static_cast<std::int64_t>(rng() % 400);
        std::size_t below = 0;
        for (const Segment& s : d.segments) {
            if (s.duration_s() < threshold) ++below;
        }
        const double expected =
            static_cast<double>(below) / static_cast<double>(d.segments.size());
        require(quantile_below(d, threshold) == expected, "quantile oracle mismatch");
    }

    const double fraction = quantile_below(data.m1, cfg.duration_quantile.threshold_s);
    require(std::fabs(fraction - 0.80) <= 0.02,
            "planted quantile off: " + std::to_string(fraction));
}

// 8. The planted 5% reroute share is reproduced by match_datasets within
//    one percentage point.
void criterion_m1_m3_gap() {
    const ReferenceRun& run = reference_run();
    const MatchReport report = match_datasets(run.data.m1, run.data.m3);
    require(std::fabs(report.m3_only_pct - 5.0) <= 1.0,
            "m3-only share " + std::to_string(report.m3_only_pct) + "% not within 5% +- 1");
}

// 9. A pipeline run repeated from its manifest, including under a different
//    --jobs value, yields byte-identical outputs.
void criterion_determinism() {
    const char* bin = std::getenv("GHOSTFILTER_BIN");
    require(bin != nullptr, "GHOSTFILTER_BIN not set");

    const fs::path dir = fs::temp_directory_path() / "ghostfilter_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto shell = [&](const std::string& args) {
        const std::string command = std::string(bin) + " " + args + " >/dev/null 2>&1";
        const int status = std::system(command.c_str());
        require(status != -1 && WEXITSTATUS(status) == 0, "command failed: " + args);
    };
    auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        require(in.good(), "missing " + path.string());
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };

    shell("generate --seed 7 --flights 400 -o " + dir.string());
    const std::string inputs =
        " --m1 " + (dir / "m1.seg").string() + " --m3 " + (dir / "m3.seg").string();
    shell("pipeline" + inputs + " -o " + (dir / "a").string());

    // Reconstruct the command from the manifest and run it twice more, once
    // with a different jobs value.
    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    std::string rebuilt = std::string(manifest["subcommand"]);
    rebuilt += " --m1 " + std::string(manifest["inputs"]["m1"]);
    rebuilt += " --m3 " + std::string(manifest["inputs"]["m3"]);
    rebuilt += " --max-sep " + std::to_string(static_cast<long long>(manifest["params"]["max-sep"]));
    rebuilt += " --min-fl " + std::to_string(static_cast<long long>(manifest["params"]["min-fl"]));
    rebuilt +=
        " --sweep-step " + std::to_string(static_cast<long long>(manifest["params"]["sweep-step"]));
    rebuilt += " --sweep-max " + std::string(manifest["params"]["sweep-max"]);
    rebuilt += " --estimator " + std::string(manifest["params"]["estimator"]);
    rebuilt += " --epsilon " + std::to_string(static_cast<double>(manifest["params"]["epsilon"]));
    rebuilt += " --granularity " + std::string(manifest["params"]["granularity"]);
    rebuilt += " --density-denominator " +
               std::string(manifest["params"]["density-denominator"]);
    shell(rebuilt + " --jobs 1 -o " + (dir / "b").string());
    shell(rebuilt + " --jobs 4 -o " + (dir / "c").string());

    for (const auto& name : manifest["outputs"]) {
        const std::string file = name;
        if (file == "manifest.json") continue;
        const std::string reference = slurp(dir / "a" / file);
        require(slurp(dir / "b" / file) == reference, file + " differs on re-run");
        require(slurp(dir / "c" / file) == reference, file + " differs under --jobs 4");
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"1. Threshold recovery (2000 s, one sweep step, < 10 s)", criterion_threshold_recovery},
        {"2. Conflict reduction by two orders of magnitude", criterion_two_orders},
        {"3. Detector equals brute-force oracle on 100 instances", criterion_oracle_equivalence},
        {"4. Monotonicity and filter soundness (1000+ samples)", criterion_monotonicity},
        {"5. Density equals exact rational to < 1 ulp", criterion_density_exactness},
        {"6. SEG round-trip canonicalization on 50 files", criterion_round_trip},
        {"7. Statistics oracles and planted duration quantile", criterion_statistics},
        {"8. Planted m1/m3 mismatch within +-1 point of 5%", criterion_m1_m3_gap},
        {"9. Pipeline determinism from its manifest across --jobs", criterion_determinism},
    };

    int failures = 0;
    for (const auto& [name, body] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        try {
            body();
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::printf("[PASS] %s (%.2fs)\n", name.c_str(), elapsed);
        } catch (const Failure& failure) {
            std::printf("[FAIL] %s: %s\n", name.c_str(), failure.message.c_str());
            ++failures;
        } catch (const std::exception& e) {
            std::printf("[FAIL] %s: unexpected error: %s\n", name.c_str(), e.what());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
