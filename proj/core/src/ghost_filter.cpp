#include "ghostfilter/ghost_filter.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "ghostfilter/errors.hpp"
#include "ghostfilter/seg_io.hpp"

namespace ghostfilter {

std::string_view to_string(FilterGranularity granularity) {
    return granularity == FilterGranularity::Segment ? "segment" : "flight";
}

std::string_view to_string(DensityDenominator denominator) {
    return denominator == DensityDenominator::Segments ? "segments" : "flights";
}

std::string_view to_string(EstimatorMethod method) {
    return method == EstimatorMethod::FirstBelowEpsilon ? "first-below-eps" : "largest-drop";
}

std::vector<DeviationRecord> compute_deviations(const TrajectoryDataset& m1,
                                                const TrajectoryDataset& m3) {
    const MatchReport report = match_datasets(m1, m3);

    std::vector<DeviationRecord> records;
    records.reserve(report.matched.size() + report.m3_only.size());
    for (const CrossingMatch& match : report.matched) {
        records.push_back({match.m1.flight_id, match.m1.point_id, match.m1.t, match.m3.t,
                           std::abs(match.m1.t - match.m3.t)});
    }
    for (const Crossing& crossing : report.m3_only) {
        records.push_back({crossing.flight_id, crossing.point_id, std::nullopt, crossing.t, 0});
    }

    std::sort(records.begin(), records.end(), [](const DeviationRecord& a, const DeviationRecord& b) {
        if (int c = a.flight_id.compare(b.flight_id); c != 0) return c < 0;
        if (int c = a.point_id.compare(b.point_id); c != 0) return c < 0;
        return a.t_m3 < b.t_m3;
    });
    return records;
}

namespace {

using RecordKey = std::tuple<std::string_view, std::string_view, std::int64_t>;

std::map<RecordKey, const DeviationRecord*> index_records(
    std::span<const DeviationRecord> deviations) {
    std::map<RecordKey, const DeviationRecord*> index;
    for (const DeviationRecord& record : deviations) {
        index[{record.flight_id, record.point_id, record.t_m3}] = &record;
    }
    return index;
}

// Per-flight summary for the whole-flight mode: a flight is kept when any of
// its crossings passes the threshold.
struct FlightSummary {
    std::int64_t max_finite_deviation = -1;
    bool has_m3_only = false;

    bool passes(std::int64_t threshold_s) const {
        return has_m3_only || max_finite_deviation > threshold_s;
    }
};

std::map<std::string_view, FlightSummary> summarize_flights(
    std::span<const DeviationRecord> deviations) {
    std::map<std::string_view, FlightSummary> summaries;
    for (const DeviationRecord& record : deviations) {
        FlightSummary& summary = summaries[record.flight_id];
        if (record.m3_only()) {
            summary.has_m3_only = true;
        } else {
            summary.max_finite_deviation = std::max(summary.max_finite_deviation,
                                                    record.deviation_s);
        }
    }
    return summaries;
}

// Resolves each segment to the record of its begin crossing once, so sweeps
// evaluate each threshold in O(segments).
std::vector<const DeviationRecord*> resolve_segments(
    const TrajectoryDataset& m3, std::span<const DeviationRecord> deviations) {
    const auto index = index_records(deviations);
    std::vector<const DeviationRecord*> resolved;
    resolved.reserve(m3.segments.size());
    for (const Segment& segment : m3.segments) {
        auto it = index.find({segment.flight_id, segment.begin_point_id, segment.t_begin});
        if (it == index.end()) {
            throw InconsistentDeviations("segment of flight " + segment.flight_id +
                                         " beginning at " + segment.begin_point_id + ", t=" +
                                         std::to_string(segment.t_begin) +
                                         " has no deviation record");
        }
        resolved.push_back(it->second);
    }
    return resolved;
}

TrajectoryDataset filter_resolved(const TrajectoryDataset& m3,
                                  std::span<const DeviationRecord* const> resolved,
                                  const std::map<std::string_view, FlightSummary>* flights,
                                  std::int64_t threshold_s) {
    TrajectoryDataset kept;
    kept.kind = m3.kind;
    kept.day = m3.day;
    for (std::size_t i = 0; i < m3.segments.size(); ++i) {
        const bool pass = flights ? flights->at(m3.segments[i].flight_id).passes(threshold_s)
                                  : resolved[i]->passes(threshold_s);
        if (pass) kept.segments.push_back(m3.segments[i]);
    }
    return kept;
}

SweepPoint density_from_kept(const TrajectoryDataset& kept, std::int64_t threshold_s,
                             const ConflictParams& params, DensityDenominator denominator) {
    SweepPoint point;
    point.threshold_s = threshold_s;
    point.kept_segments = kept.segments.size();

    const std::vector<Crossing> crossings = derive_crossings(kept);
    const std::vector<ConflictPair> pairs = detect_conflicts(crossings, params);
    point.n_los = pairs.size();

    std::size_t denom = kept.segments.size();
    if (denominator == DensityDenominator::Flights) {
        std::set<std::string_view> flights;
        for (const Segment& segment : kept.segments) flights.insert(segment.flight_id);
        denom = flights.size();
    }
    point.density = static_cast<double>(point.n_los) /
                    (static_cast<double>(denom) * static_cast<double>(denom));
    return point;
}

}  // namespace

TrajectoryDataset filter_at(const TrajectoryDataset& m3,
                            std::span<const DeviationRecord> deviations,
                            std::int64_t threshold_s, FilterGranularity granularity) {
    const auto resolved = resolve_segments(m3, deviations);
    if (granularity == FilterGranularity::Flight) {
        const auto flights = summarize_flights(deviations);
        return filter_resolved(m3, resolved, &flights, threshold_s);
    }
    return filter_resolved(m3, resolved, nullptr, threshold_s);
}

SweepPoint density_at(const TrajectoryDataset& m3, std::span<const DeviationRecord> deviations,
                      std::int64_t threshold_s, const ConflictParams& params,
                      FilterGranularity granularity, DensityDenominator denominator) {
    const TrajectoryDataset kept = filter_at(m3, deviations, threshold_s, granularity);
    if (kept.segments.empty()) {
        throw EmptyFiltered("threshold " + std::to_string(threshold_s) +
                            " removes every segment; density is undefined");
    }
    return density_from_kept(kept, threshold_s, params, denominator);
}

std::vector<SweepPoint> sweep(const TrajectoryDataset& m1, const TrajectoryDataset& m3,
                              std::span<const std::int64_t> thresholds,
                              const SweepOptions& options) {
    if (thresholds.empty()) throw std::invalid_argument("sweep: thresholds must be non-empty");
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (thresholds[i] <= thresholds[i - 1]) {
            throw std::invalid_argument("sweep: thresholds must be strictly ascending");
        }
    }

    const std::vector<DeviationRecord> deviations = compute_deviations(m1, m3);
    const auto resolved = resolve_segments(m3, deviations);
    const auto flights = options.granularity == FilterGranularity::Flight
                             ? summarize_flights(deviations)
                             : std::map<std::string_view, FlightSummary>{};
    const auto* flights_ptr =
        options.granularity == FilterGranularity::Flight ? &flights : nullptr;

    std::vector<SweepPoint> points(thresholds.size());
    auto evaluate = [&](std::size_t i) {
        const TrajectoryDataset kept = filter_resolved(m3, resolved, flights_ptr, thresholds[i]);
        if (kept.segments.empty()) {
            points[i] = SweepPoint{thresholds[i], 0, 0, std::nullopt};
        } else {
            points[i] = density_from_kept(kept, thresholds[i], options.conflict,
                                          options.denominator);
        }
    };

    const unsigned workers = std::min<std::size_t>(std::max(1u, options.jobs), thresholds.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < thresholds.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < thresholds.size();
                     i = next.fetch_add(1)) {
                    evaluate(i);
                }
            });
        }
        for (std::thread& t : threads) t.join();
    }
    return points;
}

std::vector<std::int64_t> default_sweep_thresholds(std::span<const DeviationRecord> deviations,
                                                   std::int64_t step_s) {
    if (step_s <= 0) throw std::invalid_argument("default_sweep_thresholds: step must be > 0");
    std::int64_t max_finite = 0;
    for (const DeviationRecord& record : deviations) {
        if (!record.m3_only()) max_finite = std::max(max_finite, record.deviation_s);
    }
    const std::int64_t limit = 2 * max_finite;
    std::vector<std::int64_t> thresholds;
    for (std::int64_t t = 0; t <= limit || thresholds.empty(); t += step_s) {
        thresholds.push_back(t);
        if (t > limit) break;
    }
    return thresholds;
}

ThresholdEstimate estimate_threshold(std::span<const SweepPoint> sweep_points,
                                     EstimatorMethod method, double epsilon) {
    std::vector<const SweepPoint*> defined;
    for (const SweepPoint& point : sweep_points) {
        if (point.density.has_value()) defined.push_back(&point);
    }
    std::sort(defined.begin(), defined.end(), [](const SweepPoint* a, const SweepPoint* b) {
        return a->threshold_s < b->threshold_s;
    });
    if (defined.size() < 2) {
        throw NoTransition("need at least two sweep points with a defined density");
    }

    ThresholdEstimate estimate;
    estimate.method = method;
    estimate.epsilon = epsilon;
    estimate.sweep.assign(sweep_points.begin(), sweep_points.end());

    if (method == EstimatorMethod::FirstBelowEpsilon) {
        for (const SweepPoint* point : defined) {
            if (*point->density <= epsilon) {
                estimate.delta_t_s = point->threshold_s;
                return estimate;
            }
        }
        throw NoTransition("density never drops to <= " + std::to_string(epsilon));
    }

    // LargestRelativeDrop. A zero numerator-and-denominator step counts as no
    // drop; ties keep the earliest step.
    double best = 0.0;
    std::size_t best_index = defined.size();
    for (std::size_t i = 0; i + 1 < defined.size(); ++i) {
        const double drop = *defined[i]->density - *defined[i + 1]->density;
        const double denom = std::max(*defined[i]->density, epsilon);
        const double relative = denom > 0.0 ? drop / denom : 0.0;
        if (relative > best) {
            best = relative;
            best_index = i;
        }
    }
    if (best_index == defined.size() || best <= 0.0) {
        throw NoTransition("density curve has no drop");
    }
    estimate.delta_t_s = defined[best_index + 1]->threshold_s;
    return estimate;
}

ConflictReport filtered_conflict_report(const TrajectoryDataset& m1, const TrajectoryDataset& m3,
                                        std::int64_t threshold_s, const ConflictParams& params,
                                        FilterGranularity granularity) {
    const std::vector<DeviationRecord> deviations = compute_deviations(m1, m3);
    const TrajectoryDataset kept = filter_at(m3, deviations, threshold_s, granularity);

    ConflictReport report;
    const std::vector<Crossing> crossings = derive_crossings(kept);
    report.pairs = detect_conflicts(crossings, params);
    report.cumulative = cumulative_by_separation(report.pairs, params.max_separation_s);
    return report;
}

std::string sweep_csv(std::span<const SweepPoint> points) {
    std::string out = "threshold_s,kept_segments,n_los,density\n";
    char buf[64];
    for (const SweepPoint& point : points) {
        out += std::to_string(point.threshold_s) + ',' + std::to_string(point.kept_segments) +
               ',' + std::to_string(point.n_los) + ',';
        if (point.density.has_value()) {
            std::snprintf(buf, sizeof(buf), "%.17g", *point.density);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::string estimate_json(const ThresholdEstimate& estimate) {
    nlohmann::json doc;
    doc["delta_t_s"] = estimate.delta_t_s;
    doc["method"] = std::string(to_string(estimate.method));
    doc["epsilon"] = estimate.epsilon;
    return doc.dump(2) + "\n";
}

}  // namespace ghostfilter
