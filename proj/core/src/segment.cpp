#include "ghostfilter/segment.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "ghostfilter/errors.hpp"

namespace ghostfilter {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::Climb: return "CLIMB";
        case Phase::Enroute: return "ENROUTE";
        case Phase::Descent: return "DESCENT";
    }
    return "?";
}

std::string_view to_string(DatasetKind kind) {
    return kind == DatasetKind::M1 ? "M1" : "M3";
}

std::optional<Phase> parse_phase(std::string_view text) {
    if (text == "CLIMB") return Phase::Climb;
    if (text == "ENROUTE") return Phase::Enroute;
    if (text == "DESCENT") return Phase::Descent;
    return std::nullopt;
}

std::optional<DatasetKind> parse_dataset_kind(std::string_view text) {
    if (text == "M1") return DatasetKind::M1;
    if (text == "M3") return DatasetKind::M3;
    return std::nullopt;
}

bool Date::valid() const {
    if (year < 1 || month < 1 || month > 12 || day < 1) return false;
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int max_day = kDays[month - 1];
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap) max_day = 29;
    return day <= max_day;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<Date> Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto digits = [&](std::size_t pos, std::size_t len, int& out) {
        out = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9') return false;
            out = out * 10 + (text[i] - '0');
        }
        return true;
    };
    Date d;
    if (!digits(0, 4, d.year) || !digits(5, 2, d.month) || !digits(8, 2, d.day)) return std::nullopt;
    if (!d.valid()) return std::nullopt;
    return d;
}

namespace {

bool clean_string(std::string_view value) {
    for (char c : value) {
        if (c == ',' || c == '\n' || c == '\r') return false;
    }
    return true;
}

}  // namespace

std::optional<std::string> segment_violation(const Segment& s) {
    if (s.flight_id.empty()) return "flight_id: must be non-empty";
    if (s.flight_id.front() == '#') return "flight_id: must not start with '#'";
    if (!clean_string(s.flight_id)) return "flight_id: contains ',' or a line break";
    if (!clean_string(s.origin)) return "origin: contains ',' or a line break";
    if (!clean_string(s.destination)) return "destination: contains ',' or a line break";
    if (!clean_string(s.aircraft_type)) return "aircraft_type: contains ',' or a line break";
    if (s.begin_point_id.empty()) return "begin_point_id: must be non-empty";
    if (!clean_string(s.begin_point_id)) return "begin_point_id: contains ',' or a line break";
    if (s.end_point_id.empty()) return "end_point_id: must be non-empty";
    if (!clean_string(s.end_point_id)) return "end_point_id: contains ',' or a line break";
    if (s.t_begin < 0) return "t_begin: must be >= 0";
    if (s.t_end < s.t_begin) return "t_end: must be >= t_begin";
    if (!(s.lat_begin >= -90.0 && s.lat_begin <= 90.0)) return "lat_begin: out of [-90, 90]";
    if (!(s.lon_begin >= -180.0 && s.lon_begin < 180.0)) return "lon_begin: out of [-180, 180)";
    if (!(s.lat_end >= -90.0 && s.lat_end <= 90.0)) return "lat_end: out of [-90, 90]";
    if (!(s.lon_end >= -180.0 && s.lon_end < 180.0)) return "lon_end: out of [-180, 180)";
    if (s.fl_begin < 0) return "fl_begin: must be >= 0";
    if (s.fl_end < 0) return "fl_end: must be >= 0";
    if (!(s.distance_nm >= 0.0)) return "distance: must be >= 0";
    return std::nullopt;
}

void validate_dataset(const TrajectoryDataset& dataset) {
    if (!dataset.day.valid()) {
        throw InvalidSegment("dataset day " + dataset.day.to_string() + " is not a valid date");
    }

    std::set<std::tuple<std::string_view, std::string_view, std::int64_t>> keys;
    std::map<std::string_view, std::vector<std::pair<std::int64_t, std::int64_t>>> by_flight;

    for (std::size_t i = 0; i < dataset.segments.size(); ++i) {
        const Segment& s = dataset.segments[i];
        if (auto violation = segment_violation(s)) {
            throw InvalidSegment("segment " + std::to_string(i) + ": " + *violation);
        }
        auto [it, inserted] = keys.emplace(s.flight_id, s.begin_point_id, s.t_begin);
        if (!inserted) {
            throw DuplicateSegment("segment " + std::to_string(i) + ": duplicate key (" +
                                   s.flight_id + ", " + s.begin_point_id + ", " +
                                   std::to_string(s.t_begin) + ")");
        }
        by_flight[s.flight_id].emplace_back(s.t_begin, s.t_end);
    }

    for (auto& [flight, intervals] : by_flight) {
        std::sort(intervals.begin(), intervals.end());
        for (std::size_t i = 1; i < intervals.size(); ++i) {
            // Overlap means the intervals share more than an endpoint.
            if (intervals[i].first < intervals[i - 1].second) {
                throw OverlappingSegments("flight " + std::string(flight) +
                                          ": segments overlap in time near t=" +
                                          std::to_string(intervals[i].first));
            }
        }
    }
}

TrajectoryDataset make_dataset(DatasetKind kind, Date day, std::vector<Segment> segments) {
    TrajectoryDataset dataset{kind, day, std::move(segments)};
    validate_dataset(dataset);
    return dataset;
}

namespace {

struct EndpointRecord {
    const Segment* segment;
    bool from_begin;

    std::string_view point() const {
        return from_begin ? segment->begin_point_id : segment->end_point_id;
    }
    std::int64_t t() const { return from_begin ? segment->t_begin : segment->t_end; }
    int fl() const { return from_begin ? segment->fl_begin : segment->fl_end; }
};

}  // namespace

std::vector<Crossing> derive_crossings(const TrajectoryDataset& dataset) {
    std::vector<EndpointRecord> records;
    records.reserve(2 * dataset.segments.size());
    for (const Segment& s : dataset.segments) {
        records.push_back({&s, true});
        records.push_back({&s, false});
    }

    // Group duplicates of (flight_id, point_id, t). Within a group the begin
    // endpoint of the later segment wins, so chained legs A->B, B->C yield a
    // single crossing at B carrying B->C's begin fl and phase.
    std::sort(records.begin(), records.end(), [](const EndpointRecord& a, const EndpointRecord& b) {
        if (int c = a.segment->flight_id.compare(b.segment->flight_id); c != 0) return c < 0;
        if (int c = a.point().compare(b.point()); c != 0) return c < 0;
        if (a.t() != b.t()) return a.t() < b.t();
        if (a.from_begin != b.from_begin) return a.from_begin;
        return a.segment->t_begin > b.segment->t_begin;
    });

    std::vector<Crossing> crossings;
    crossings.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const EndpointRecord& r = records[i];
        if (i > 0) {
            const EndpointRecord& prev = records[i - 1];
            if (prev.segment->flight_id == r.segment->flight_id && prev.point() == r.point() &&
                prev.t() == r.t()) {
                continue;
            }
        }
        crossings.push_back(Crossing{r.segment->flight_id, std::string(r.point()), r.t(), r.fl(),
                                     r.segment->phase});
    }

    std::sort(crossings.begin(), crossings.end(), [](const Crossing& a, const Crossing& b) {
        if (int c = a.point_id.compare(b.point_id); c != 0) return c < 0;
        if (a.fl != b.fl) return a.fl < b.fl;
        if (a.t != b.t) return a.t < b.t;
        return a.flight_id < b.flight_id;
    });
    return crossings;
}

}  // namespace ghostfilter
