#include "ghostfilter/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <json.hpp>

#include "ghostfilter/errors.hpp"

namespace ghostfilter {

namespace {

constexpr std::int64_t kMinDuration = 5;     // seconds
constexpr std::int64_t kMaxDuration = 3600;  // seconds; gives the long tail
constexpr int kMaxFlights = 999999;          // keeps zero-padded ids ordered

// mt19937_64 with hand-rolled draw helpers. The standard library specifies
// the engine but not the distributions, so distributions are implemented
// here to keep equal seeds reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Inclusive bounds, rejection-sampled.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return lo + static_cast<std::int64_t>(next());
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return lo + static_cast<std::int64_t>(x % span);
    }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0, 1)

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * unit(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform_real(std::log(lo), std::log(hi)));
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

enum class Role { Cancelled, Ghost, Updated };

struct PairPlan {
    std::size_t leader = 0;        // flight index built first
    std::size_t follower = 0;
    int leader_point = 0;          // interior point index carrying the shared id
    int follower_point = 0;
    std::int64_t separation_s = 0;  // planted |t_a - t_b|, < 120
    std::int64_t deviation_s = 0;   // shared stale-plan deviation, < true threshold
    int cruise_fl = 0;
    std::string point_id;
};

struct FlightPlan {
    std::string id;
    Role role = Role::Updated;
    int n_segments = 0;
    int cruise_fl = 0;
    std::int64_t deviation_s = 0;  // m3 time shift; meaningless for cancelled flights
    const PairPlan* pair = nullptr;
    bool is_follower = false;

    std::string origin;
    std::string destination;
    std::string aircraft_type;
    std::vector<std::string> point_ids;   // n_segments + 1
    std::vector<std::int64_t> times;      // crossing time per point
    std::vector<double> lats;
    std::vector<double> lons;
};

double quantize_deg(double value) { return std::llround(value * 1e6) / 1e6; }

std::string airport_code(Rng& rng) {
    std::int64_t x = rng.uniform_int(0, 26LL * 26 * 26 * 26 - 1);
    std::string code(4, 'A');
    for (int i = 3; i >= 0; --i) {
        code[static_cast<std::size_t>(i)] = static_cast<char>('A' + x % 26);
        x /= 26;
    }
    return code;
}

std::string_view aircraft_type(Rng& rng) {
    static constexpr std::string_view kTypes[] = {"A320", "B738", "A333", "CRJ9", "E190", "B77W"};
    return kTypes[static_cast<std::size_t>(rng.uniform_int(0, 5))];
}

std::int64_t draw_duration(Rng& rng, const DurationQuantile& quantile) {
    const bool below = rng.unit() < quantile.fraction;
    const auto lo = static_cast<double>(kMinDuration);
    const auto mid = static_cast<double>(quantile.threshold_s);
    const auto hi = static_cast<double>(kMaxDuration);
    if (below) {
        auto d = static_cast<std::int64_t>(std::floor(rng.log_uniform(lo, mid)));
        return std::clamp(d, kMinDuration, quantile.threshold_s - 1);
    }
    auto d = static_cast<std::int64_t>(std::floor(rng.log_uniform(mid, hi)));
    return std::clamp(d, quantile.threshold_s, kMaxDuration);
}

void validate_config(const SynthConfig& cfg) {
    auto fail = [](const std::string& what) { throw InfeasibleConfig(what); };
    if (cfg.n_flights < 1) fail("n_flights must be >= 1");
    if (cfg.n_flights > kMaxFlights) fail("n_flights must be <= 999999");
    if (cfg.segments_per_flight.min < 1 || cfg.segments_per_flight.min > cfg.segments_per_flight.max) {
        fail("segments_per_flight range is degenerate");
    }
    if (!(cfg.ghost_fraction >= 0.0 && cfg.ghost_fraction <= 1.0)) {
        fail("ghost_fraction must be in [0, 1]");
    }
    if (!(cfg.reroute_fraction >= 0.0 && cfg.reroute_fraction <= 1.0)) {
        fail("reroute_fraction must be in [0, 1]");
    }
    if (!(cfg.conflict_injection_rate >= 0.0)) fail("conflict_injection_rate must be >= 0");
    if (cfg.true_threshold_s < 2) fail("true_threshold_s must be >= 2");
    if (cfg.duration_quantile.threshold_s < kMinDuration + 1 ||
        cfg.duration_quantile.threshold_s > kMaxDuration - 1) {
        fail("duration_quantile.threshold_s must lie within the duration range");
    }
    if (!(cfg.duration_quantile.fraction >= 0.0 && cfg.duration_quantile.fraction <= 1.0)) {
        fail("duration_quantile.fraction must be in [0, 1]");
    }
    const BBox& b = cfg.bbox;
    if (!(b.lat_min >= -90.0 && b.lat_max <= 90.0 && b.lat_min < b.lat_max)) {
        fail("bbox latitude bounds invalid");
    }
    if (!(b.lon_min >= -180.0 && b.lon_max < 180.0 && b.lon_min < b.lon_max)) {
        fail("bbox longitude bounds invalid");
    }
    if (!cfg.day.valid()) fail("day is not a valid date");
}

double segment_distance_nm(double lat0, double lon0, double lat1, double lon1) {
    const double mid_lat = (lat0 + lat1) * 0.5 * std::numbers::pi / 180.0;
    const double dlat = lat1 - lat0;
    const double dlon = (lon1 - lon0) * std::cos(mid_lat);
    return std::round(60.0 * std::hypot(dlat, dlon) * 100.0) / 100.0;
}

}  // namespace

SynthResult generate(const SynthConfig& cfg) {
    validate_config(cfg);
    Rng rng(cfg.seed);

    const auto n = static_cast<std::size_t>(cfg.n_flights);
    std::vector<FlightPlan> flights(n);
    for (std::size_t f = 0; f < n; ++f) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "FL%06zu", f);
        flights[f].id = buf;
        flights[f].n_segments = static_cast<int>(
            rng.uniform_int(cfg.segments_per_flight.min, cfg.segments_per_flight.max));
    }

    // Role assignment. Ghosts come from the back of a shuffled order,
    // cancellations greedily from the front until the planted segment-count
    // gap between the planned and executed files is reached.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);

    const auto n_ghost = static_cast<std::size_t>(std::llround(cfg.ghost_fraction * cfg.n_flights));
    if (n_ghost > n) throw InfeasibleConfig("ghost_fraction selects more flights than exist");
    std::vector<std::size_t> ghosts(order.end() - static_cast<std::ptrdiff_t>(n_ghost), order.end());

    std::size_t n_pairs = static_cast<std::size_t>(
        std::llround(cfg.conflict_injection_rate * static_cast<double>(n_ghost)));
    n_pairs = std::min(n_pairs, n_ghost / 2);
    if (n_pairs > 0 && cfg.segments_per_flight.max < 3) {
        throw InfeasibleConfig("conflict injection needs flights with at least 3 segments");
    }

    std::vector<PairPlan> pairs(n_pairs);
    std::set<std::size_t> paired;
    for (std::size_t j = 0; j < n_pairs; ++j) {
        std::size_t a = ghosts[2 * j];
        std::size_t b = ghosts[2 * j + 1];
        paired.insert(a);
        paired.insert(b);
        flights[a].n_segments = std::max(flights[a].n_segments, 3);
        flights[b].n_segments = std::max(flights[b].n_segments, 3);

        PairPlan& pair = pairs[j];
        pair.leader = std::min(a, b);
        pair.follower = std::max(a, b);

        // Conflict-pair deviations are stratified over [1, threshold) so the
        // density stays positive at every candidate below the true threshold.
        const std::int64_t strata = std::max<std::int64_t>(
            1, std::min<std::int64_t>(static_cast<std::int64_t>(n_pairs),
                                      cfg.true_threshold_s / 100));
        const std::int64_t width = cfg.true_threshold_s / strata;
        const std::int64_t stratum = static_cast<std::int64_t>(j) % strata;
        const std::int64_t lo = stratum * width + 1;
        const std::int64_t hi =
            stratum == strata - 1 ? cfg.true_threshold_s - 1 : (stratum + 1) * width - 1;
        pair.deviation_s = rng.uniform_int(lo, std::max(lo, hi));

        pair.cruise_fl = static_cast<int>(10 * rng.uniform_int(20, 40));
        pair.leader_point =
            static_cast<int>(rng.uniform_int(1, flights[pair.leader].n_segments - 2));
        pair.follower_point =
            static_cast<int>(rng.uniform_int(1, flights[pair.follower].n_segments - 2));
        pair.separation_s = rng.uniform_int(0, 119);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "CX%05zu", j);
        pair.point_id = buf;

        flights[pair.leader].pair = &pair;
        flights[pair.follower].pair = &pair;
        flights[pair.follower].is_follower = true;
        flights[pair.leader].cruise_fl = pair.cruise_fl;
        flights[pair.follower].cruise_fl = pair.cruise_fl;
        flights[pair.leader].role = Role::Ghost;
        flights[pair.follower].role = Role::Ghost;
        flights[pair.leader].deviation_s = pair.deviation_s;
        flights[pair.follower].deviation_s = pair.deviation_s;
    }
    for (std::size_t g : ghosts) {
        if (paired.contains(g)) continue;
        flights[g].role = Role::Ghost;
        flights[g].deviation_s = rng.uniform_int(0, cfg.true_threshold_s - 1);
    }

    std::int64_t planned_segments = 0;
    for (const FlightPlan& flight : flights) planned_segments += flight.n_segments;

    const auto cancel_target =
        static_cast<std::int64_t>(std::llround(cfg.reroute_fraction * static_cast<double>(planned_segments)));
    std::int64_t cancelled_segments = 0;
    for (std::size_t i = 0; i + n_ghost < n && cancelled_segments < cancel_target; ++i) {
        flights[order[i]].role = Role::Cancelled;
        cancelled_segments += flights[order[i]].n_segments;
    }
    if (cancelled_segments < cancel_target) {
        throw InfeasibleConfig("reroute_fraction and ghost_fraction together exceed the dataset");
    }

    const std::int64_t min_update = (11 * cfg.true_threshold_s + 9) / 10;  // ceil(1.1 * threshold)
    for (std::size_t f = 0; f < n; ++f) {
        if (flights[f].role == Role::Updated) {
            flights[f].deviation_s = rng.uniform_int(min_update, 3 * cfg.true_threshold_s);
        }
    }

    // Flight construction, in id order. Followers derive their start time
    // from the leader's planted crossing, so leaders are always built first.
    const std::int64_t max_total_duration =
        static_cast<std::int64_t>(cfg.segments_per_flight.max < 3 ? 3 : cfg.segments_per_flight.max) *
        kMaxDuration;
    for (std::size_t f = 0; f < n; ++f) {
        FlightPlan& flight = flights[f];
        const int k = flight.n_segments;
        flight.origin = airport_code(rng);
        flight.destination = airport_code(rng);
        flight.aircraft_type = std::string(aircraft_type(rng));
        if (flight.cruise_fl == 0) flight.cruise_fl = static_cast<int>(10 * rng.uniform_int(20, 40));

        std::int64_t start = 0;
        if (!flight.is_follower) {
            start = flight.pair != nullptr
                        ? rng.uniform_int(max_total_duration, max_total_duration + 20000)
                        : rng.uniform_int(0, 50000);
        }

        std::vector<std::int64_t> durations(static_cast<std::size_t>(k));
        for (auto& d : durations) d = draw_duration(rng, cfg.duration_quantile);

        flight.lats.resize(static_cast<std::size_t>(k) + 1);
        flight.lons.resize(static_cast<std::size_t>(k) + 1);
        flight.lats[0] = quantize_deg(rng.uniform_real(cfg.bbox.lat_min, cfg.bbox.lat_max));
        flight.lons[0] = quantize_deg(rng.uniform_real(cfg.bbox.lon_min, cfg.bbox.lon_max));
        for (std::size_t p = 1; p <= static_cast<std::size_t>(k); ++p) {
            const double lat = flight.lats[p - 1] + rng.uniform_real(-0.5, 0.5);
            const double lon = flight.lons[p - 1] + rng.uniform_real(-0.5, 0.5);
            flight.lats[p] = quantize_deg(std::clamp(lat, cfg.bbox.lat_min, cfg.bbox.lat_max));
            flight.lons[p] = quantize_deg(std::clamp(lon, cfg.bbox.lon_min, cfg.bbox.lon_max));
        }

        if (flight.is_follower) {
            const PairPlan& pair = *flight.pair;
            const FlightPlan& leader = flights[pair.leader];
            const std::int64_t target =
                leader.times[static_cast<std::size_t>(pair.leader_point)] + pair.separation_s;
            std::int64_t prefix = 0;
            for (int p = 0; p < pair.follower_point; ++p) {
                prefix += durations[static_cast<std::size_t>(p)];
            }
            start = target - prefix;
            flight.lats[static_cast<std::size_t>(pair.follower_point)] =
                leader.lats[static_cast<std::size_t>(pair.leader_point)];
            flight.lons[static_cast<std::size_t>(pair.follower_point)] =
                leader.lons[static_cast<std::size_t>(pair.leader_point)];
        }

        flight.times.resize(static_cast<std::size_t>(k) + 1);
        flight.times[0] = start;
        for (std::size_t p = 1; p <= static_cast<std::size_t>(k); ++p) {
            flight.times[p] = flight.times[p - 1] + durations[p - 1];
        }

        flight.point_ids.resize(static_cast<std::size_t>(k) + 1);
        for (std::size_t p = 0; p <= static_cast<std::size_t>(k); ++p) {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "P%06zuN%02zu", f, p);
            flight.point_ids[p] = buf;
        }
        if (flight.pair != nullptr) {
            const int shared =
                flight.is_follower ? flight.pair->follower_point : flight.pair->leader_point;
            flight.point_ids[static_cast<std::size_t>(shared)] = flight.pair->point_id;
        }
    }

    // Planned dataset.
    TrajectoryDataset m1;
    m1.kind = DatasetKind::M1;
    m1.day = cfg.day;
    auto emit_segments = [](const FlightPlan& flight, std::int64_t shift,
                            std::vector<Segment>& out) {
        const int k = flight.n_segments;
        for (int j = 1; j <= k; ++j) {
            Segment s;
            s.flight_id = flight.id;
            s.origin = flight.origin;
            s.destination = flight.destination;
            s.aircraft_type = flight.aircraft_type;
            s.begin_point_id = flight.point_ids[static_cast<std::size_t>(j - 1)];
            s.end_point_id = flight.point_ids[static_cast<std::size_t>(j)];
            s.t_begin = flight.times[static_cast<std::size_t>(j - 1)] + shift;
            s.t_end = flight.times[static_cast<std::size_t>(j)] + shift;
            s.lat_begin = flight.lats[static_cast<std::size_t>(j - 1)];
            s.lon_begin = flight.lons[static_cast<std::size_t>(j - 1)];
            s.lat_end = flight.lats[static_cast<std::size_t>(j)];
            s.lon_end = flight.lons[static_cast<std::size_t>(j)];
            if (k == 1) {
                s.fl_begin = s.fl_end = flight.cruise_fl;
                s.phase = Phase::Enroute;
            } else if (j == 1) {
                s.fl_begin = 50;
                s.fl_end = flight.cruise_fl;
                s.phase = Phase::Climb;
            } else if (j == k) {
                s.fl_begin = flight.cruise_fl;
                s.fl_end = 30;
                s.phase = Phase::Descent;
            } else {
                s.fl_begin = s.fl_end = flight.cruise_fl;
                s.phase = Phase::Enroute;
            }
            s.distance_nm = segment_distance_nm(s.lat_begin, s.lon_begin, s.lat_end, s.lon_end);
            out.push_back(std::move(s));
        }
    };
    for (const FlightPlan& flight : flights) emit_segments(flight, 0, m1.segments);

    // Executed dataset: cancelled flights vanish, the rest shift by their
    // deviation.
    TrajectoryDataset m3;
    m3.kind = DatasetKind::M3;
    m3.day = cfg.day;
    std::vector<std::pair<std::size_t, std::size_t>> flight_rows;  // (first row, count) per index
    flight_rows.resize(n, {0, 0});
    for (const FlightPlan& flight : flights) {
        const std::size_t index = static_cast<std::size_t>(&flight - flights.data());
        if (flight.role == Role::Cancelled) continue;
        flight_rows[index] = {m3.segments.size(), static_cast<std::size_t>(flight.n_segments)};
        emit_segments(flight, flight.deviation_s, m3.segments);
    }

    // Reroutes: rename interior points of radar-updated flights so a planted
    // share of executed crossings has no plan counterpart.
    std::int64_t executed_crossings = 0;
    for (const FlightPlan& flight : flights) {
        if (flight.role != Role::Cancelled) executed_crossings += flight.n_segments + 1;
    }
    const auto replace_target = static_cast<std::size_t>(
        std::llround(cfg.reroute_fraction * static_cast<double>(executed_crossings)));
    std::vector<std::pair<std::size_t, int>> pool;  // (flight index, interior point)
    for (std::size_t f = 0; f < n; ++f) {
        if (flights[f].role != Role::Updated) continue;
        for (int p = 1; p < flights[f].n_segments; ++p) pool.emplace_back(f, p);
    }
    if (pool.size() < replace_target) {
        throw InfeasibleConfig("not enough radar-updated interior points to plant " +
                               std::to_string(replace_target) + " reroutes");
    }
    rng.shuffle(pool);
    for (std::size_t r = 0; r < replace_target; ++r) {
        const auto [f, p] = pool[r];
        char buf[32];
        std::snprintf(buf, sizeof(buf), "RX%07zu", r);
        const auto [first_row, row_count] = flight_rows[f];
        Segment& inbound = m3.segments[first_row + static_cast<std::size_t>(p) - 1];
        Segment& outbound = m3.segments[first_row + static_cast<std::size_t>(p)];
        (void)row_count;
        inbound.end_point_id = buf;
        outbound.begin_point_id = buf;
    }

    SynthResult result;
    result.m1 = make_dataset(DatasetKind::M1, cfg.day, std::move(m1.segments));
    result.m3 = make_dataset(DatasetKind::M3, cfg.day, std::move(m3.segments));

    GroundTruth& truth = result.truth;
    truth.true_threshold_s = cfg.true_threshold_s;
    for (const FlightPlan& flight : flights) {
        if (flight.role == Role::Ghost) truth.ghost_flight_ids.insert(flight.id);
        if (flight.role != Role::Cancelled) truth.planted_deviations[flight.id] = flight.deviation_s;
    }
    for (const PairPlan& pair : pairs) {
        const FlightPlan& leader = flights[pair.leader];
        const FlightPlan& follower = flights[pair.follower];
        InjectedConflict conflict;
        conflict.point_id = pair.point_id;
        conflict.fl = pair.cruise_fl;
        const std::int64_t t_leader =
            leader.times[static_cast<std::size_t>(pair.leader_point)] + pair.deviation_s;
        const std::int64_t t_follower =
            follower.times[static_cast<std::size_t>(pair.follower_point)] + pair.deviation_s;
        if (leader.id < follower.id) {
            conflict.flight_a = leader.id;
            conflict.flight_b = follower.id;
            conflict.t_a = t_leader;
            conflict.t_b = t_follower;
        } else {
            conflict.flight_a = follower.id;
            conflict.flight_b = leader.id;
            conflict.t_a = t_follower;
            conflict.t_b = t_leader;
        }
        truth.injected_conflict_pairs.push_back(std::move(conflict));
    }
    std::sort(truth.injected_conflict_pairs.begin(), truth.injected_conflict_pairs.end(),
              [](const InjectedConflict& a, const InjectedConflict& b) {
                  return a.point_id < b.point_id;
              });
    return result;
}

std::string truth_json(const GroundTruth& truth) {
    nlohmann::json doc;
    doc["true_threshold_s"] = truth.true_threshold_s;
    doc["ghost_flight_ids"] = truth.ghost_flight_ids;
    doc["planted_deviations"] = truth.planted_deviations;
    auto& pairs = doc["injected_conflict_pairs"] = nlohmann::json::array();
    for (const InjectedConflict& conflict : truth.injected_conflict_pairs) {
        pairs.push_back({{"flight_a", conflict.flight_a},
                         {"flight_b", conflict.flight_b},
                         {"point_id", conflict.point_id},
                         {"fl", conflict.fl},
                         {"t_a", conflict.t_a},
                         {"t_b", conflict.t_b}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace ghostfilter
