#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ghostfilter/segment.hpp"
#include "ghostfilter/synth.hpp"

namespace ghostfilter::testing {

inline Segment seg(std::string flight, std::string from, std::string to, std::int64_t t0,
                   std::int64_t t1, int fl0 = 350, int fl1 = 350,
                   Phase phase = Phase::Enroute) {
    Segment s;
    s.flight_id = std::move(flight);
    s.origin = "AAAA";
    s.destination = "BBBB";
    s.aircraft_type = "A320";
    s.begin_point_id = std::move(from);
    s.end_point_id = std::move(to);
    s.t_begin = t0;
    s.t_end = t1;
    s.lat_begin = 48.0;
    s.lon_begin = 2.0;
    s.lat_end = 48.5;
    s.lon_end = 2.5;
    s.fl_begin = fl0;
    s.fl_end = fl1;
    s.phase = phase;
    s.distance_nm = 10.0;
    return s;
}

inline Date day() { return Date{2011, 6, 15}; }

inline TrajectoryDataset dataset(DatasetKind kind, std::vector<Segment> segments) {
    return make_dataset(kind, day(), std::move(segments));
}

/// A dataset of independent one-segment flights with the given durations;
/// handy for histogram and quantile tests.
inline TrajectoryDataset flat_dataset(const std::vector<std::int64_t>& durations) {
    std::vector<Segment> segments;
    for (std::size_t i = 0; i < durations.size(); ++i) {
        const std::string id = "F" + std::to_string(i);
        segments.push_back(
            seg(id, id + "a", id + "b", 1000, 1000 + durations[i]));
    }
    return dataset(DatasetKind::M3, std::move(segments));
}

inline SynthConfig small_config(std::uint64_t seed, int flights = 50) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_flights = flights;
    return cfg;
}

/// Random crossings with distinct (flight, point, t) keys, mixing phases and
/// levels around the defaults so every predicate clause gets exercised.
inline std::vector<Crossing> random_crossings(std::mt19937_64& rng, std::size_t count) {
    std::vector<Crossing> crossings;
    std::set<std::tuple<std::string, std::string, std::int64_t>> used;
    static const Phase kPhases[] = {Phase::Climb, Phase::Enroute, Phase::Descent};
    static const int kLevels[] = {150, 190, 200, 210, 350, 360};
    while (crossings.size() < count) {
        Crossing c;
        c.flight_id = "F" + std::to_string(rng() % 40);
        c.point_id = "P" + std::to_string(rng() % 12);
        c.t = static_cast<std::int64_t>(rng() % 3000);
        c.fl = kLevels[rng() % 6];
        c.phase = kPhases[rng() % 3];
        if (used.emplace(c.flight_id, c.point_id, c.t).second) crossings.push_back(std::move(c));
    }
    return crossings;
}

}  // namespace ghostfilter::testing
