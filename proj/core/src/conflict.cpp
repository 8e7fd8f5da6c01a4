#include "ghostfilter/conflict.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace ghostfilter {

namespace {

void validate_params(const ConflictParams& params) {
    if (params.max_separation_s <= 0) {
        throw std::invalid_argument("ConflictParams.max_separation_s must be > 0");
    }
    if (params.min_fl < 0) {
        throw std::invalid_argument("ConflictParams.min_fl must be >= 0");
    }
}

ConflictPair make_pair(const Crossing& x, const Crossing& y) {
    const bool x_first = x.flight_id < y.flight_id;
    const Crossing& a = x_first ? x : y;
    const Crossing& b = x_first ? y : x;
    return ConflictPair{a, b, std::abs(a.t - b.t)};
}

void sort_pairs(std::vector<ConflictPair>& pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const ConflictPair& l, const ConflictPair& r) {
        if (int c = l.a.point_id.compare(r.a.point_id); c != 0) return c < 0;
        if (l.a.fl != r.a.fl) return l.a.fl < r.a.fl;
        if (l.separation_s != r.separation_s) return l.separation_s < r.separation_s;
        if (int c = l.a.flight_id.compare(r.a.flight_id); c != 0) return c < 0;
        if (int c = l.b.flight_id.compare(r.b.flight_id); c != 0) return c < 0;
        return l.a.t < r.a.t;
    });
}

}  // namespace

std::vector<ConflictPair> detect_conflicts(std::span<const Crossing> crossings,
                                           const ConflictParams& params, unsigned jobs) {
    validate_params(params);

    // Eligible crossings only; bucket key is (point_id, fl).
    std::vector<const Crossing*> eligible;
    eligible.reserve(crossings.size());
    for (const Crossing& c : crossings) {
        if (c.phase == params.required_phase && c.fl >= params.min_fl) eligible.push_back(&c);
    }
    std::sort(eligible.begin(), eligible.end(), [](const Crossing* a, const Crossing* b) {
        if (int c = a->point_id.compare(b->point_id); c != 0) return c < 0;
        if (a->fl != b->fl) return a->fl < b->fl;
        if (a->t != b->t) return a->t < b->t;
        return a->flight_id < b->flight_id;
    });

    struct Bucket {
        std::size_t first = 0;
        std::size_t last = 0;  // exclusive
    };
    std::vector<Bucket> buckets;
    for (std::size_t i = 0; i < eligible.size();) {
        std::size_t j = i + 1;
        while (j < eligible.size() && eligible[j]->point_id == eligible[i]->point_id &&
               eligible[j]->fl == eligible[i]->fl) {
            ++j;
        }
        if (j - i > 1) buckets.push_back({i, j});
        i = j;
    }

    auto scan_bucket = [&](const Bucket& bucket, std::vector<ConflictPair>& out) {
        for (std::size_t i = bucket.first; i < bucket.last; ++i) {
            for (std::size_t j = i + 1;
                 j < bucket.last && eligible[j]->t - eligible[i]->t < params.max_separation_s;
                 ++j) {
                if (eligible[i]->flight_id == eligible[j]->flight_id) continue;
                out.push_back(make_pair(*eligible[i], *eligible[j]));
            }
        }
    };

    std::vector<ConflictPair> pairs;
    const unsigned workers =
        std::min<std::size_t>(std::max(1u, jobs), std::max<std::size_t>(1, buckets.size()));
    if (workers <= 1) {
        for (const Bucket& bucket : buckets) scan_bucket(bucket, pairs);
    } else {
        std::vector<std::vector<ConflictPair>> partial(buckets.size());
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                for (std::size_t b = next.fetch_add(1); b < buckets.size(); b = next.fetch_add(1)) {
                    scan_bucket(buckets[b], partial[b]);
                }
            });
        }
        for (std::thread& t : threads) t.join();
        for (std::vector<ConflictPair>& chunk : partial) {
            pairs.insert(pairs.end(), std::make_move_iterator(chunk.begin()),
                         std::make_move_iterator(chunk.end()));
        }
    }

    sort_pairs(pairs);
    return pairs;
}

std::vector<ConflictPair> detect_conflicts_bruteforce(std::span<const Crossing> crossings,
                                                      const ConflictParams& params) {
    validate_params(params);

    std::vector<ConflictPair> pairs;
    for (std::size_t i = 0; i < crossings.size(); ++i) {
        for (std::size_t j = i + 1; j < crossings.size(); ++j) {
            const Crossing& x = crossings[i];
            const Crossing& y = crossings[j];
            if (x.flight_id == y.flight_id) continue;
            if (x.point_id != y.point_id || x.fl != y.fl) continue;
            if (std::abs(x.t - y.t) >= params.max_separation_s) continue;
            if (x.fl < params.min_fl || y.fl < params.min_fl) continue;
            if (x.phase != params.required_phase || y.phase != params.required_phase) continue;
            pairs.push_back(make_pair(x, y));
        }
    }
    sort_pairs(pairs);
    return pairs;
}

std::vector<CumulativePoint> cumulative_by_separation(std::span<const ConflictPair> pairs,
                                                      std::int64_t max_separation_s) {
    if (max_separation_s < 0) {
        throw std::invalid_argument("cumulative_by_separation: max_separation_s must be >= 0");
    }
    std::vector<std::uint64_t> at(static_cast<std::size_t>(max_separation_s) + 1, 0);
    for (const ConflictPair& p : pairs) {
        if (p.separation_s <= max_separation_s) ++at[static_cast<std::size_t>(p.separation_s)];
    }
    std::vector<CumulativePoint> series(at.size());
    std::uint64_t running = 0;
    for (std::size_t s = 0; s < at.size(); ++s) {
        running += at[s];
        series[s] = {static_cast<std::int64_t>(s), running};
    }
    return series;
}

std::string conflicts_csv(std::span<const ConflictPair> pairs) {
    std::string out = "point_id,fl,flight_a,flight_b,t_a,t_b,separation_s\n";
    char buf[64];
    for (const ConflictPair& p : pairs) {
        out += p.a.point_id;
        out += ',' + std::to_string(p.a.fl) + ',';
        out += p.a.flight_id;
        out += ',';
        out += p.b.flight_id;
        std::snprintf(buf, sizeof(buf), ",%lld,%lld,%lld\n", static_cast<long long>(p.a.t),
                      static_cast<long long>(p.b.t), static_cast<long long>(p.separation_s));
        out += buf;
    }
    return out;
}

std::string cumulative_csv(std::span<const CumulativePoint> series) {
    std::string out = "sep_s,count\n";
    for (const CumulativePoint& point : series) {
        out += std::to_string(point.separation_s) + ',' + std::to_string(point.count) + '\n';
    }
    return out;
}

}  // namespace ghostfilter
