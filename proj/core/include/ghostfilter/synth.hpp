#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ghostfilter/segment.hpp"

namespace ghostfilter {

/// Target quantile of the segment-duration distribution: a `fraction` share
/// of segments shorter than `threshold_s`.
struct DurationQuantile {
    std::int64_t threshold_s = 120;
    double fraction = 0.80;
};

struct SegmentsPerFlight {
    int min = 3;
    int max = 8;
};

struct BBox {
    double lat_min = 35.0;
    double lat_max = 60.0;
    double lon_min = -10.0;
    double lon_max = 25.0;
};

/// Configuration of the paired-dataset generator. Everything is derived
/// deterministically from `seed`; identical configs give byte-identical
/// datasets.
struct SynthConfig {
    std::uint64_t seed = 0;
    int n_flights = 1000;
    SegmentsPerFlight segments_per_flight{};
    std::int64_t true_threshold_s = 2000;   // the planted update threshold
    double ghost_fraction = 0.2;            // flights left with stale plan times
    double reroute_fraction = 0.05;         // drives cancellations and new-point crossings
    DurationQuantile duration_quantile{};
    double conflict_injection_rate = 0.3;   // planted conflict pairs per ghost flight
    BBox bbox{};
    Date day{2011, 6, 1};
};

/// A conflict planted between two ghost flights at a shared en-route point.
/// Times are as they appear in the executed dataset.
struct InjectedConflict {
    std::string flight_a;  // lexicographically smaller id
    std::string flight_b;
    std::string point_id;
    int fl = 0;
    std::int64_t t_a = 0;
    std::int64_t t_b = 0;
};

/// Everything the generator planted, verifiable against the emitted datasets.
struct GroundTruth {
    std::set<std::string> ghost_flight_ids;
    std::int64_t true_threshold_s = 0;
    std::map<std::string, std::int64_t> planted_deviations;  // per flight in m3
    std::vector<InjectedConflict> injected_conflict_pairs;
};

struct SynthResult {
    TrajectoryDataset m1;
    TrajectoryDataset m3;
    GroundTruth truth;
};

/// Generates a planned dataset and its executed counterpart with a planted
/// update rule: flights whose deviation reached true_threshold_s carry their
/// true (shifted) times in m3, ghost flights keep times within
/// [0, true_threshold_s) of the plan, a reroute share of flights is cancelled
/// or flown via renamed points, and conflicts are planted only among ghost
/// flights so they vanish once the dataset is filtered at the true threshold.
/// Throws InfeasibleConfig when the configuration cannot be realized.
SynthResult generate(const SynthConfig& config);

std::string truth_json(const GroundTruth& truth);

}  // namespace ghostfilter
