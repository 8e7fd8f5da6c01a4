#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ghostfilter/segment.hpp"

namespace ghostfilter {

/// Parses SEGv1 text (UTF-8, LF line endings).
///
/// Line 1:  SEGv1,day=<YYYY-MM-DD>,kind=<M1|M3>
/// Rows:    flight_id,origin,destination,aircraft_type,begin_point_id,
///          end_point_id,t_begin,t_end,lat_begin,lon_begin,fl_begin,
///          lat_end,lon_end,fl_end,phase,distance
///
/// Lines starting with '#' are comments and are skipped. Row order is
/// preserved. Throws InvalidHeader, MalformedRow (with line and column),
/// DuplicateSegment or OverlappingSegments.
TrajectoryDataset parse_segment_file(std::string_view bytes);

/// Serializes a dataset to canonical SEG text: header line, rows sorted by
/// (flight_id, t_begin), degrees with 6 decimals, integer seconds and flight
/// levels, distance with 2 decimals, LF endings, no comments.
std::string write_segment_file(const TrajectoryDataset& dataset);

/// A plan crossing paired with its executed counterpart.
struct CrossingMatch {
    Crossing m1;
    Crossing m3;

    bool operator==(const CrossingMatch&) const = default;
};

/// Result of joining the planned and executed files of one day.
struct MatchReport {
    std::vector<CrossingMatch> matched;
    std::vector<Crossing> m3_only;  // executed crossings with no plan counterpart
    std::vector<Crossing> m1_only;  // planned crossings never flown
    double m3_only_pct = 0.0;       // 100 * |m3_only| / |m3 crossings|

    // Same mismatch measured over raw segment rows, keyed by
    // (flight_id, begin_point_id, end_point_id). Reference figure only; the
    // crossing-level percentage above is the one the ghost filter uses.
    double m3_only_segment_pct = 0.0;
};

/// Joins crossings by (flight_id, point_id). When a flight crosses the same
/// point more than once in either file, pairs are formed in ascending time
/// order and the surplus stays unmatched. Throws DayMismatch when the two
/// datasets cover different days.
MatchReport match_datasets(const TrajectoryDataset& m1, const TrajectoryDataset& m3);

}  // namespace ghostfilter
