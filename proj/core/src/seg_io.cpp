#include "ghostfilter/seg_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "ghostfilter/errors.hpp"

namespace ghostfilter {

namespace {

constexpr std::array<const char*, 16> kColumns = {
    "flight_id", "origin",   "destination", "aircraft_type", "begin_point_id", "end_point_id",
    "t_begin",   "t_end",    "lat_begin",   "lon_begin",     "fl_begin",       "lat_end",
    "lon_end",   "fl_end",   "phase",       "distance",
};

std::int64_t parse_seconds(std::string_view field, std::size_t line, const char* column) {
    std::int64_t value = 0;
    if (field.empty()) throw MalformedRow(line, column, "empty field");
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0) {
        throw MalformedRow(line, column, "expected non-negative integer seconds, got '" +
                                             std::string(field) + "'");
    }
    return value;
}

int parse_flight_level(std::string_view field, std::size_t line, const char* column) {
    int value = 0;
    if (field.empty()) throw MalformedRow(line, column, "empty field");
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0) {
        throw MalformedRow(line, column,
                           "expected non-negative integer flight level, got '" +
                               std::string(field) + "'");
    }
    return value;
}

double parse_real(std::string_view field, std::size_t line, const char* column) {
    double value = 0.0;
    if (field.empty()) throw MalformedRow(line, column, "empty field");
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw MalformedRow(line, column, "expected decimal number, got '" + std::string(field) + "'");
    }
    return value;
}

Segment parse_row(std::string_view row, std::size_t line) {
    std::array<std::string_view, 16> fields;
    std::size_t count = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= row.size(); ++i) {
        if (i == row.size() || row[i] == ',') {
            if (count == fields.size()) {
                throw MalformedRow(line, "field count", "expected 16 comma-separated fields");
            }
            fields[count++] = row.substr(start, i - start);
            start = i + 1;
        }
    }
    if (count != fields.size()) {
        throw MalformedRow(line, "field count", "expected 16 comma-separated fields, got " +
                                                    std::to_string(count));
    }

    Segment s;
    s.flight_id = std::string(fields[0]);
    s.origin = std::string(fields[1]);
    s.destination = std::string(fields[2]);
    s.aircraft_type = std::string(fields[3]);
    s.begin_point_id = std::string(fields[4]);
    s.end_point_id = std::string(fields[5]);
    s.t_begin = parse_seconds(fields[6], line, "t_begin");
    s.t_end = parse_seconds(fields[7], line, "t_end");
    s.lat_begin = parse_real(fields[8], line, "lat_begin");
    s.lon_begin = parse_real(fields[9], line, "lon_begin");
    s.fl_begin = parse_flight_level(fields[10], line, "fl_begin");
    s.lat_end = parse_real(fields[11], line, "lat_end");
    s.lon_end = parse_real(fields[12], line, "lon_end");
    s.fl_end = parse_flight_level(fields[13], line, "fl_end");
    auto phase = parse_phase(fields[14]);
    if (!phase) {
        throw MalformedRow(line, "phase",
                           "expected CLIMB, ENROUTE or DESCENT, got '" + std::string(fields[14]) + "'");
    }
    s.phase = *phase;
    s.distance_nm = parse_real(fields[15], line, "distance");

    if (auto violation = segment_violation(s)) {
        auto colon = violation->find(':');
        std::string column = violation->substr(0, colon);
        std::string detail = colon == std::string::npos ? *violation : violation->substr(colon + 2);
        throw MalformedRow(line, column, detail);
    }
    return s;
}

}  // namespace

TrajectoryDataset parse_segment_file(std::string_view bytes) {
    TrajectoryDataset dataset;
    bool header_seen = false;

    std::set<std::tuple<std::string, std::string, std::int64_t>> keys;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= bytes.size()) {
        std::size_t eol = bytes.find('\n', pos);
        std::string_view line = eol == std::string_view::npos ? bytes.substr(pos)
                                                              : bytes.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? bytes.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty() && pos > bytes.size()) break;  // trailing newline or EOF

        if (!header_seen) {
            constexpr std::string_view kPrefix = "SEGv1,day=";
            constexpr std::string_view kKind = ",kind=";
            if (line.size() != kPrefix.size() + 10 + kKind.size() + 2 ||
                line.substr(0, kPrefix.size()) != kPrefix ||
                line.substr(kPrefix.size() + 10, kKind.size()) != kKind) {
                throw InvalidHeader("line 1: expected 'SEGv1,day=<YYYY-MM-DD>,kind=<M1|M3>'");
            }
            auto day = Date::parse(line.substr(kPrefix.size(), 10));
            if (!day) throw InvalidHeader("line 1: invalid day '" +
                                          std::string(line.substr(kPrefix.size(), 10)) + "'");
            auto kind = parse_dataset_kind(line.substr(kPrefix.size() + 10 + kKind.size()));
            if (!kind) throw InvalidHeader("line 1: kind must be M1 or M3");
            dataset.day = *day;
            dataset.kind = *kind;
            header_seen = true;
            continue;
        }

        if (line.empty() || line.front() == '#') continue;
        if (line.find('\r') != std::string_view::npos) {
            throw MalformedRow(line_no, "line ending", "carriage return found; SEG is LF-only");
        }

        Segment s = parse_row(line, line_no);
        auto [it, inserted] = keys.emplace(s.flight_id, s.begin_point_id, s.t_begin);
        if (!inserted) {
            throw DuplicateSegment("line " + std::to_string(line_no) + ": duplicate key (" +
                                   s.flight_id + ", " + s.begin_point_id + ", " +
                                   std::to_string(s.t_begin) + ")");
        }
        dataset.segments.push_back(std::move(s));
    }

    if (!header_seen) throw InvalidHeader("empty input: missing SEGv1 header");
    validate_dataset(dataset);  // overlap check; field and key checks already done per row
    return dataset;
}

namespace {

void append_row(std::string& out, const Segment& s) {
    char buf[128];
    out += s.flight_id;
    out += ',';
    out += s.origin;
    out += ',';
    out += s.destination;
    out += ',';
    out += s.aircraft_type;
    out += ',';
    out += s.begin_point_id;
    out += ',';
    out += s.end_point_id;
    std::snprintf(buf, sizeof(buf), ",%lld,%lld,%.6f,%.6f,%d,%.6f,%.6f,%d,",
                  static_cast<long long>(s.t_begin), static_cast<long long>(s.t_end), s.lat_begin,
                  s.lon_begin, s.fl_begin, s.lat_end, s.lon_end, s.fl_end);
    out += buf;
    out += to_string(s.phase);
    std::snprintf(buf, sizeof(buf), ",%.2f\n", s.distance_nm);
    out += buf;
}

}  // namespace

std::string write_segment_file(const TrajectoryDataset& dataset) {
    std::vector<const Segment*> order;
    order.reserve(dataset.segments.size());
    for (const Segment& s : dataset.segments) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](const Segment* a, const Segment* b) {
        if (int c = a->flight_id.compare(b->flight_id); c != 0) return c < 0;
        if (a->t_begin != b->t_begin) return a->t_begin < b->t_begin;
        if (int c = a->begin_point_id.compare(b->begin_point_id); c != 0) return c < 0;
        if (a->t_end != b->t_end) return a->t_end < b->t_end;
        return a->end_point_id < b->end_point_id;
    });

    std::string out = "SEGv1,day=" + dataset.day.to_string() + ",kind=" +
                      std::string(to_string(dataset.kind)) + "\n";
    out.reserve(out.size() + 96 * order.size());
    for (const Segment* s : order) append_row(out, *s);
    return out;
}

MatchReport match_datasets(const TrajectoryDataset& m1, const TrajectoryDataset& m3) {
    if (m1.day != m3.day) {
        throw DayMismatch("m1 covers " + m1.day.to_string() + " but m3 covers " +
                          m3.day.to_string());
    }

    const std::vector<Crossing> c1 = derive_crossings(m1);
    const std::vector<Crossing> c3 = derive_crossings(m3);

    using Key = std::pair<std::string_view, std::string_view>;
    std::map<Key, std::pair<std::vector<const Crossing*>, std::vector<const Crossing*>>> groups;
    for (const Crossing& c : c1) groups[{c.flight_id, c.point_id}].first.push_back(&c);
    for (const Crossing& c : c3) groups[{c.flight_id, c.point_id}].second.push_back(&c);

    MatchReport report;
    for (auto& [key, lists] : groups) {
        auto& [plan, actual] = lists;
        auto by_time = [](const Crossing* a, const Crossing* b) { return a->t < b->t; };
        std::sort(plan.begin(), plan.end(), by_time);
        std::sort(actual.begin(), actual.end(), by_time);
        std::size_t paired = std::min(plan.size(), actual.size());
        for (std::size_t i = 0; i < paired; ++i) {
            report.matched.push_back({*plan[i], *actual[i]});
        }
        for (std::size_t i = paired; i < plan.size(); ++i) report.m1_only.push_back(*plan[i]);
        for (std::size_t i = paired; i < actual.size(); ++i) report.m3_only.push_back(*actual[i]);
    }

    report.m3_only_pct =
        c3.empty() ? 0.0 : 100.0 * static_cast<double>(report.m3_only.size()) /
                               static_cast<double>(c3.size());

    // Raw-row mismatch, keyed by the segment's own identity.
    using RowKey = std::tuple<std::string_view, std::string_view, std::string_view>;
    std::map<RowKey, std::pair<std::size_t, std::size_t>> rows;
    for (const Segment& s : m1.segments) {
        rows[{s.flight_id, s.begin_point_id, s.end_point_id}].first++;
    }
    for (const Segment& s : m3.segments) {
        rows[{s.flight_id, s.begin_point_id, s.end_point_id}].second++;
    }
    std::size_t matched_rows = 0;
    for (const auto& [key, counts] : rows) matched_rows += std::min(counts.first, counts.second);
    report.m3_only_segment_pct =
        m3.segments.empty()
            ? 0.0
            : 100.0 * static_cast<double>(m3.segments.size() - matched_rows) /
                  static_cast<double>(m3.segments.size());
    return report;
}

}  // namespace ghostfilter
