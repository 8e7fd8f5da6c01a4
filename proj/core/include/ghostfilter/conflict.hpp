#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ghostfilter/segment.hpp"

namespace ghostfilter {

/// Loss-of-separation predicate parameters. Defaults: two flights crossing
/// the same significant point at the same flight level less than 120 s apart,
/// both at or above FL 200 (20 000 ft) and both en-route.
struct ConflictParams {
    std::int64_t max_separation_s = 120;  // strict upper bound
    int min_fl = 200;                     // inclusive floor
    Phase required_phase = Phase::Enroute;
};

/// An unordered pair of crossings violating the separation predicate.
/// a.flight_id < b.flight_id always holds.
struct ConflictPair {
    Crossing a;
    Crossing b;
    std::int64_t separation_s = 0;  // |a.t - b.t|

    bool operator==(const ConflictPair&) const = default;
};

/// Finds every pair of crossings by distinct flights at the same point and
/// flight level, separated by less than max_separation_s, with both crossings
/// at fl >= min_fl and in the required phase. Crossings are bucketed by
/// (point_id, fl) and each bucket scanned with a time window, so the cost is
/// O(n log n + output). Buckets may be processed in parallel with `jobs`
/// threads; the output is identical regardless. Sorted by
/// (point_id, fl, separation_s, flight ids).
std::vector<ConflictPair> detect_conflicts(std::span<const Crossing> crossings,
                                           const ConflictParams& params, unsigned jobs = 1);

/// Literal all-pairs translation of the same predicate. Test oracle; no
/// performance guarantees. Output contract identical to detect_conflicts.
std::vector<ConflictPair> detect_conflicts_bruteforce(std::span<const Crossing> crossings,
                                                      const ConflictParams& params);

struct CumulativePoint {
    std::int64_t separation_s = 0;
    std::uint64_t count = 0;

    bool operator==(const CumulativePoint&) const = default;
};

/// For each integer s in [0, max_separation_s], the number of pairs with
/// separation_s <= s. Non-decreasing; the final value equals the pair count.
std::vector<CumulativePoint> cumulative_by_separation(std::span<const ConflictPair> pairs,
                                                      std::int64_t max_separation_s);

std::string conflicts_csv(std::span<const ConflictPair> pairs);
std::string cumulative_csv(std::span<const CumulativePoint> series);

}  // namespace ghostfilter
