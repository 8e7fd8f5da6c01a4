#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ghostfilter {

/// Flight phase carried by every segment and crossing.
enum class Phase { Climb, Enroute, Descent };

/// Which of the paired per-day files a dataset came from: M1 holds the last
/// filed flight plans, M3 the plans corrected by radar where the deviation
/// exceeded the provider's update thresholds.
enum class DatasetKind { M1, M3 };

std::string_view to_string(Phase phase);
std::string_view to_string(DatasetKind kind);
std::optional<Phase> parse_phase(std::string_view text);
std::optional<DatasetKind> parse_dataset_kind(std::string_view text);

/// Calendar date (UTC) a dataset covers.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    bool valid() const;
    std::string to_string() const;  // YYYY-MM-DD
    static std::optional<Date> parse(std::string_view text);
};

/// One trajectory leg between two significant points, with 4D coordinates at
/// both ends. Times are integer seconds since 00:00:00 UTC of the dataset
/// day; flight levels are hundreds of feet.
struct Segment {
    std::string flight_id;        // unique per flight per day
    std::string origin;           // departure airport code
    std::string destination;      // destination airport code
    std::string aircraft_type;
    std::string begin_point_id;   // significant-point identifier
    std::string end_point_id;
    std::int64_t t_begin = 0;
    std::int64_t t_end = 0;
    double lat_begin = 0.0;       // degrees, [-90, 90]
    double lon_begin = 0.0;       // degrees, [-180, 180)
    int fl_begin = 0;
    double lat_end = 0.0;
    double lon_end = 0.0;
    int fl_end = 0;
    Phase phase = Phase::Enroute;
    double distance_nm = 0.0;     // nautical miles, >= 0

    std::int64_t duration_s() const noexcept { return t_end - t_begin; }

    bool operator==(const Segment&) const = default;
};

/// Returns a description of the first violated field constraint (naming the
/// column), or std::nullopt when the segment is well formed.
std::optional<std::string> segment_violation(const Segment& segment);

/// A full per-day trajectory file in memory. Segment order is whatever the
/// producer supplied; the canonical on-disk order is applied on write.
struct TrajectoryDataset {
    DatasetKind kind = DatasetKind::M1;
    Date day;
    std::vector<Segment> segments;

    bool operator==(const TrajectoryDataset&) const = default;
};

/// Checks every per-segment field constraint plus the dataset invariants:
/// no two segments share (flight_id, begin_point_id, t_begin), and segments
/// of one flight do not overlap in time (touching endpoints are fine).
/// Throws InvalidSegment, DuplicateSegment or OverlappingSegments.
void validate_dataset(const TrajectoryDataset& dataset);

/// Validating constructor; returns the dataset or throws as validate_dataset.
TrajectoryDataset make_dataset(DatasetKind kind, Date day, std::vector<Segment> segments);

/// One flight passing one significant point at one time and flight level.
struct Crossing {
    std::string flight_id;
    std::string point_id;
    std::int64_t t = 0;
    int fl = 0;
    Phase phase = Phase::Enroute;

    bool operator==(const Crossing&) const = default;
};

/// Normalizes segment endpoints into point-passage events. Emits one crossing
/// per distinct (flight_id, point_id, t); where a segment's end coincides with
/// the next segment's begin the crossing is emitted once, taking fl and phase
/// from the later segment's begin endpoint. Output is sorted by
/// (point_id, fl, t, flight_id) and is deterministic for identical input.
std::vector<Crossing> derive_crossings(const TrajectoryDataset& dataset);

}  // namespace ghostfilter
