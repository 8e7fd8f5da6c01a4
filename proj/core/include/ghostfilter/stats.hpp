#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ghostfilter/segment.hpp"

namespace ghostfilter {

/// Fixed-edge histogram of segment durations in seconds.
struct Histogram {
    std::vector<std::int64_t> bin_edges;  // strictly increasing, >= 2 edges
    std::vector<std::uint64_t> counts;    // bin_edges.size() - 1 entries
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;

    /// Total mass; equals the number of histogrammed segments.
    std::uint64_t total() const;
};

/// Per-cell aggregate of segment durations. The integer sum is kept so that
/// coarser grids can be compared against aggregated finer grids exactly.
struct GridCell {
    std::int64_t duration_sum_s = 0;
    std::uint64_t segment_count = 0;

    double mean_duration_s() const {
        return static_cast<double>(duration_sum_s) / static_cast<double>(segment_count);
    }
};

/// Disjoint floor-aligned tiling of the globe; only occupied cells are stored.
struct SpatialGrid {
    double cell_size_deg = 1.0;
    std::map<std::pair<std::int64_t, std::int64_t>, GridCell> cells;  // (lat_idx, lon_idx)
};

struct DayInput {
    Date day;
    const TrajectoryDataset* m1 = nullptr;
    const TrajectoryDataset* m3 = nullptr;
};

struct DailyCount {
    Date day;
    std::size_t m1_count = 0;
    std::size_t m3_count = 0;
};

/// One row per day, sorted by day. Throws DuplicateDay.
std::vector<DailyCount> daily_counts(std::span<const DayInput> days);

/// Bins each segment's duration d into bin i when edges[i] <= d < edges[i+1];
/// d < edges.front() counts as underflow, d >= edges.back() as overflow.
/// Throws BadEdges for fewer than two or non-increasing edges.
Histogram duration_histogram(const TrajectoryDataset& dataset,
                             std::span<const std::int64_t> bin_edges);

/// Fraction of segments with duration strictly below threshold_s.
/// Throws EmptyDataset.
double quantile_below(const TrajectoryDataset& dataset, std::int64_t threshold_s);

/// Groups segments by the floor-aligned cell containing their begin point and
/// records the mean duration per occupied cell. Cell indices are computed on
/// micro-degree integers, so a 1.0-degree grid aggregates the 0.1-degree grid
/// exactly. cell_size_deg must be a positive multiple of 1e-6 degrees.
SpatialGrid spatial_grid(const TrajectoryDataset& dataset, double cell_size_deg);

/// Suggested logarithmic edges for duration histograms (seconds).
std::span<const std::int64_t> default_histogram_edges();

std::string daily_counts_csv(std::span<const DailyCount> series);
std::string histogram_csv(const Histogram& histogram);
std::string spatial_grid_csv(const SpatialGrid& grid);

/// Filename-friendly rendering of a cell size, e.g. 1.0 -> "1.0", 0.1 -> "0.1".
std::string cell_size_label(double cell_size_deg);

}  // namespace ghostfilter
