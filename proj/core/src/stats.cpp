#include "ghostfilter/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "ghostfilter/errors.hpp"

namespace ghostfilter {

std::uint64_t Histogram::total() const {
    std::uint64_t sum = underflow + overflow;
    for (std::uint64_t c : counts) sum += c;
    return sum;
}

std::vector<DailyCount> daily_counts(std::span<const DayInput> days) {
    std::vector<DailyCount> series;
    series.reserve(days.size());
    std::set<Date> seen;
    for (const DayInput& input : days) {
        if (!seen.insert(input.day).second) {
            throw DuplicateDay("day " + input.day.to_string() + " appears more than once");
        }
        series.push_back({input.day, input.m1 ? input.m1->segments.size() : 0,
                          input.m3 ? input.m3->segments.size() : 0});
    }
    std::sort(series.begin(), series.end(),
              [](const DailyCount& a, const DailyCount& b) { return a.day < b.day; });
    return series;
}

Histogram duration_histogram(const TrajectoryDataset& dataset,
                             std::span<const std::int64_t> bin_edges) {
    if (bin_edges.size() < 2) throw BadEdges("need at least two bin edges");
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
        if (bin_edges[i] <= bin_edges[i - 1]) {
            throw BadEdges("bin edges must be strictly increasing at index " + std::to_string(i));
        }
    }

    Histogram h;
    h.bin_edges.assign(bin_edges.begin(), bin_edges.end());
    h.counts.assign(bin_edges.size() - 1, 0);
    for (const Segment& s : dataset.segments) {
        const std::int64_t d = s.duration_s();
        if (d < h.bin_edges.front()) {
            ++h.underflow;
        } else if (d >= h.bin_edges.back()) {
            ++h.overflow;
        } else {
            auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), d);
            ++h.counts[static_cast<std::size_t>(it - h.bin_edges.begin()) - 1];
        }
    }
    return h;
}

double quantile_below(const TrajectoryDataset& dataset, std::int64_t threshold_s) {
    if (dataset.segments.empty()) throw EmptyDataset("quantile_below: dataset has no segments");
    std::size_t below = 0;
    for (const Segment& s : dataset.segments) {
        if (s.duration_s() < threshold_s) ++below;
    }
    return static_cast<double>(below) / static_cast<double>(dataset.segments.size());
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t to_micro_deg(double degrees) {
    return std::llround(degrees * 1e6);
}

}  // namespace

SpatialGrid spatial_grid(const TrajectoryDataset& dataset, double cell_size_deg) {
    const std::int64_t cell_micro = to_micro_deg(cell_size_deg);
    if (!(cell_size_deg > 0.0) || cell_micro < 1) {
        throw Error("spatial_grid: cell size must be a positive multiple of 1e-6 degrees");
    }

    SpatialGrid grid;
    grid.cell_size_deg = cell_size_deg;
    for (const Segment& s : dataset.segments) {
        const std::int64_t lat_idx = floor_div(to_micro_deg(s.lat_begin), cell_micro);
        const std::int64_t lon_idx = floor_div(to_micro_deg(s.lon_begin), cell_micro);
        GridCell& cell = grid.cells[{lat_idx, lon_idx}];
        cell.duration_sum_s += s.duration_s();
        cell.segment_count += 1;
    }
    return grid;
}

std::span<const std::int64_t> default_histogram_edges() {
    static const std::int64_t kEdges[] = {0,   15,  30,   60,   120,  240,
                                          480, 960, 1920, 3840, 7680, 15360};
    return kEdges;
}

std::string daily_counts_csv(std::span<const DailyCount> series) {
    std::string out = "day,m1,m3\n";
    for (const DailyCount& row : series) {
        out += row.day.to_string();
        out += ',' + std::to_string(row.m1_count) + ',' + std::to_string(row.m3_count) + '\n';
    }
    return out;
}

std::string histogram_csv(const Histogram& histogram) {
    std::string out = "edge_lo,edge_hi,count\n";
    if (histogram.underflow > 0) {
        out += "-inf," + std::to_string(histogram.bin_edges.front()) + ',' +
               std::to_string(histogram.underflow) + '\n';
    }
    for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
        out += std::to_string(histogram.bin_edges[i]) + ',' +
               std::to_string(histogram.bin_edges[i + 1]) + ',' +
               std::to_string(histogram.counts[i]) + '\n';
    }
    if (histogram.overflow > 0) {
        out += std::to_string(histogram.bin_edges.back()) + ",inf," +
               std::to_string(histogram.overflow) + '\n';
    }
    return out;
}

std::string spatial_grid_csv(const SpatialGrid& grid) {
    std::string out = "lat_idx,lon_idx,mean_s,count\n";
    char buf[64];
    for (const auto& [index, cell] : grid.cells) {
        std::snprintf(buf, sizeof(buf), "%lld,%lld,%.6f,%llu\n",
                      static_cast<long long>(index.first), static_cast<long long>(index.second),
                      cell.mean_duration_s(), static_cast<unsigned long long>(cell.segment_count));
        out += buf;
    }
    return out;
}

std::string cell_size_label(double cell_size_deg) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", cell_size_deg);
    std::string label(buf);
    while (label.size() > 1 && label.back() == '0' && label[label.size() - 2] != '.') {
        label.pop_back();
    }
    return label;
}

}  // namespace ghostfilter
