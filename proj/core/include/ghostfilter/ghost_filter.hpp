#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ghostfilter/conflict.hpp"
#include "ghostfilter/segment.hpp"

namespace ghostfilter {

/// Time deviation of one matched crossing between the planned and executed
/// files. Crossings present only in the executed file carry no plan time and
/// behave as an infinite deviation: they survive any finite threshold.
struct DeviationRecord {
    std::string flight_id;
    std::string point_id;
    std::optional<std::int64_t> t_m1;  // absent for executed-only crossings
    std::int64_t t_m3 = 0;
    std::int64_t deviation_s = 0;      // |t_m1 - t_m3| when t_m1 is present

    bool m3_only() const { return !t_m1.has_value(); }

    /// The filter keeps a crossing when its deviation strictly exceeds the
    /// candidate threshold, or when there is no plan time to compare against.
    bool passes(std::int64_t threshold_s) const {
        return m3_only() || deviation_s > threshold_s;
    }
};

/// Apply the deviation test per segment (via its begin crossing), or drop a
/// flight only when none of its crossings pass.
enum class FilterGranularity { Segment, Flight };

/// Denominator of the conflict density: squared kept-segment count, or
/// squared distinct-flight count.
enum class DensityDenominator { Segments, Flights };

enum class EstimatorMethod { FirstBelowEpsilon, LargestRelativeDrop };

std::string_view to_string(FilterGranularity granularity);
std::string_view to_string(DensityDenominator denominator);
std::string_view to_string(EstimatorMethod method);

/// One sample of the density curve: at candidate threshold delta-t', the
/// filtered dataset keeps `kept_segments` segments and yields `n_los`
/// loss-of-separation pairs, for a density of n_los / kept^2. The density is
/// absent (not zero) when the filter empties the dataset.
struct SweepPoint {
    std::int64_t threshold_s = 0;
    std::size_t kept_segments = 0;
    std::size_t n_los = 0;
    std::optional<double> density;

    bool operator==(const SweepPoint&) const = default;
};

struct ThresholdEstimate {
    std::int64_t delta_t_s = 0;  // always one of the sweep's thresholds
    EstimatorMethod method = EstimatorMethod::FirstBelowEpsilon;
    double epsilon = 0.0;
    std::vector<SweepPoint> sweep;
};

struct SweepOptions {
    ConflictParams conflict;
    FilterGranularity granularity = FilterGranularity::Segment;
    DensityDenominator denominator = DensityDenominator::Segments;
    unsigned jobs = 1;
};

/// One record per matched crossing of the same day's (m1, m3) pair, plus an
/// infinite-deviation record per executed-only crossing. Sorted by
/// (flight_id, point_id, t_m3). Throws DayMismatch.
std::vector<DeviationRecord> compute_deviations(const TrajectoryDataset& m1,
                                                const TrajectoryDataset& m3);

/// Keeps exactly the executed segments whose begin-crossing deviation is
/// strictly greater than threshold_s; executed-only crossings always pass.
/// With Flight granularity a flight is kept when any of its crossings passes.
/// Throws InconsistentDeviations when a segment has no deviation record.
TrajectoryDataset filter_at(const TrajectoryDataset& m3,
                            std::span<const DeviationRecord> deviations,
                            std::int64_t threshold_s,
                            FilterGranularity granularity = FilterGranularity::Segment);

/// Filters at threshold_s, detects conflicts on the filtered crossings and
/// returns the density sample. Throws EmptyFiltered when nothing is kept.
SweepPoint density_at(const TrajectoryDataset& m3, std::span<const DeviationRecord> deviations,
                      std::int64_t threshold_s, const ConflictParams& params,
                      FilterGranularity granularity = FilterGranularity::Segment,
                      DensityDenominator denominator = DensityDenominator::Segments);

/// Evaluates the density at each candidate threshold. Thresholds must be
/// non-empty and strictly ascending. A threshold that empties the dataset is
/// recorded with an absent density rather than failing the sweep. Points may
/// be evaluated in parallel; the result is ordered by threshold and identical
/// for any jobs value.
std::vector<SweepPoint> sweep(const TrajectoryDataset& m1, const TrajectoryDataset& m3,
                              std::span<const std::int64_t> thresholds,
                              const SweepOptions& options);

/// Default candidate grid: 0 to 2x the largest finite deviation, step_s apart.
std::vector<std::int64_t> default_sweep_thresholds(std::span<const DeviationRecord> deviations,
                                                   std::int64_t step_s = 100);

/// Locates the phase transition of the density curve. FirstBelowEpsilon
/// returns the smallest threshold whose density is <= epsilon.
/// LargestRelativeDrop returns the threshold immediately after the step with
/// the largest (D_i - D_{i+1}) / max(D_i, epsilon); ties break toward the
/// smaller threshold. Points with absent density are skipped. Throws
/// NoTransition when the curve never shows the sought drop or fewer than two
/// points have a defined density.
ThresholdEstimate estimate_threshold(std::span<const SweepPoint> sweep_points,
                                     EstimatorMethod method, double epsilon);

struct ConflictReport {
    std::vector<ConflictPair> pairs;
    std::vector<CumulativePoint> cumulative;
};

/// Conflicts and their cumulative-by-separation curve on the dataset filtered
/// at threshold_s. An empty filtered dataset yields an empty report.
ConflictReport filtered_conflict_report(const TrajectoryDataset& m1, const TrajectoryDataset& m3,
                                        std::int64_t threshold_s, const ConflictParams& params,
                                        FilterGranularity granularity = FilterGranularity::Segment);

/// CSV with one row per sweep point; the density field is empty when absent
/// and otherwise printed with enough digits to round-trip the exact double.
std::string sweep_csv(std::span<const SweepPoint> points);

std::string estimate_json(const ThresholdEstimate& estimate);

}  // namespace ghostfilter
