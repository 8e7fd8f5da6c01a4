#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ghostfilter/conflict.hpp"
#include "ghostfilter/errors.hpp"
#include "ghostfilter/ghost_filter.hpp"
#include "ghostfilter/seg_io.hpp"
#include "ghostfilter/segment.hpp"
#include "ghostfilter/stats.hpp"
#include "ghostfilter/synth.hpp"
#include "ghostfilter/version.hpp"

namespace fs = std::filesystem;
using namespace ghostfilter;

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel g_log_level = LogLevel::Warn;

void init_log_level() {
    const char* env = std::getenv("GHOSTFILTER_LOG");
    if (env == nullptr) return;
    const std::string_view value(env);
    if (value == "error") g_log_level = LogLevel::Error;
    else if (value == "warn") g_log_level = LogLevel::Warn;
    else if (value == "info") g_log_level = LogLevel::Info;
    else if (value == "debug") g_log_level = LogLevel::Debug;
}

void log_at(LogLevel level, const std::string& message) {
    if (level > g_log_level) return;
    static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[%s] %s\n", kNames[static_cast<int>(level)], message.c_str());
}

void log_info(const std::string& message) { log_at(LogLevel::Info, message); }
void log_debug(const std::string& message) { log_at(LogLevel::Debug, message); }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("cannot write " + path.string());
    log_debug("wrote " + path.string() + " (" + std::to_string(content.size()) + " bytes)");
}

struct Options {
    std::string m1_path;
    std::string m3_path;
    std::string out_dir = ".";
    std::int64_t max_sep_s = 120;
    int min_fl = 200;
    std::int64_t sweep_step_s = 100;
    std::string sweep_max = "auto";
    std::string estimator = "first-below-eps";
    double epsilon = 0.0;
    std::string granularity = "segment";
    std::string density_denominator = "segments";
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    int flights = 1000;
};

ConflictParams conflict_params(const Options& opt) {
    return ConflictParams{opt.max_sep_s, opt.min_fl, Phase::Enroute};
}

FilterGranularity granularity_of(const Options& opt) {
    return opt.granularity == "flight" ? FilterGranularity::Flight : FilterGranularity::Segment;
}

DensityDenominator denominator_of(const Options& opt) {
    return opt.density_denominator == "flights" ? DensityDenominator::Flights
                                                : DensityDenominator::Segments;
}

EstimatorMethod estimator_of(const Options& opt) {
    return opt.estimator == "largest-drop" ? EstimatorMethod::LargestRelativeDrop
                                           : EstimatorMethod::FirstBelowEpsilon;
}

std::vector<std::int64_t> thresholds_of(const Options& opt,
                                        std::span<const DeviationRecord> deviations) {
    if (opt.sweep_max == "auto") {
        return default_sweep_thresholds(deviations, opt.sweep_step_s);
    }
    const std::int64_t max = std::stoll(opt.sweep_max);
    std::vector<std::int64_t> thresholds;
    for (std::int64_t t = 0; t <= max; t += opt.sweep_step_s) thresholds.push_back(t);
    if (thresholds.empty()) thresholds.push_back(0);
    return thresholds;
}

/// Everything needed to reproduce a run: inputs, materialized parameters and
/// the files the run wrote. Saved as manifest.json next to the outputs.
class Manifest {
public:
    Manifest(std::string subcommand, const Options& opt) : out_dir_(opt.out_dir) {
        doc_["tool"] = "ghostfilter";
        doc_["version"] = std::string(kVersion);
        doc_["subcommand"] = std::move(subcommand);
        doc_["out_dir"] = opt.out_dir;
        doc_["inputs"] = nlohmann::json::object();
        doc_["params"] = nlohmann::json::object();
        doc_["outputs"] = nlohmann::json::array();
    }

    void input(const std::string& name, const std::string& path) { doc_["inputs"][name] = path; }

    template <typename T>
    void param(const std::string& flag, const T& value) {
        doc_["params"][flag] = value;
    }

    void output(const fs::path& out_dir, const std::string& name, std::string_view content) {
        write_file(out_dir / name, content);
        doc_["outputs"].push_back(name);
    }

    void save() { write_file(fs::path(out_dir_) / "manifest.json", doc_.dump(2) + "\n"); }

private:
    std::string out_dir_;
    nlohmann::json doc_;
};

void run_generate(const Options& opt) {
    SynthConfig cfg;
    cfg.seed = opt.seed;
    cfg.n_flights = opt.flights;

    const SynthResult result = generate(cfg);
    log_info("generated " + std::to_string(result.m1.segments.size()) + " planned and " +
             std::to_string(result.m3.segments.size()) + " executed segments");

    Manifest manifest("generate", opt);
    manifest.param("seed", cfg.seed);
    manifest.param("flights", cfg.n_flights);
    manifest.param("true_threshold_s", cfg.true_threshold_s);
    manifest.param("ghost_fraction", cfg.ghost_fraction);
    manifest.param("reroute_fraction", cfg.reroute_fraction);
    manifest.param("conflict_injection_rate", cfg.conflict_injection_rate);
    manifest.param("duration_quantile_threshold_s", cfg.duration_quantile.threshold_s);
    manifest.param("duration_quantile_fraction", cfg.duration_quantile.fraction);
    manifest.param("day", cfg.day.to_string());

    const fs::path out(opt.out_dir);
    manifest.output(out, "m1.seg", write_segment_file(result.m1));
    manifest.output(out, "m3.seg", write_segment_file(result.m3));
    manifest.output(out, "truth.json", truth_json(result.truth));
    manifest.save();
}

void run_stats(const Options& opt) {
    const TrajectoryDataset m1 = parse_segment_file(read_file(opt.m1_path));
    const TrajectoryDataset m3 = parse_segment_file(read_file(opt.m3_path));
    if (m1.day != m3.day) {
        throw DayMismatch("m1 covers " + m1.day.to_string() + " but m3 covers " +
                          m3.day.to_string());
    }

    const DayInput day{m1.day, &m1, &m3};
    const auto series = daily_counts(std::span(&day, 1));
    const Histogram histogram = duration_histogram(m3, default_histogram_edges());
    const SpatialGrid coarse = spatial_grid(m3, 1.0);
    const SpatialGrid fine = spatial_grid(m3, 0.1);

    Manifest manifest("stats", opt);
    manifest.input("m1", opt.m1_path);
    manifest.input("m3", opt.m3_path);

    const fs::path out(opt.out_dir);
    manifest.output(out, "daily_counts.csv", daily_counts_csv(series));
    manifest.output(out, "histogram.csv", histogram_csv(histogram));
    manifest.output(out, "grid_" + cell_size_label(1.0) + ".csv", spatial_grid_csv(coarse));
    manifest.output(out, "grid_" + cell_size_label(0.1) + ".csv", spatial_grid_csv(fine));
    manifest.save();
}

void run_conflicts(const Options& opt) {
    const bool use_m3 = !opt.m3_path.empty();
    const std::string& path = use_m3 ? opt.m3_path : opt.m1_path;
    const TrajectoryDataset dataset = parse_segment_file(read_file(path));

    const auto crossings = derive_crossings(dataset);
    const auto pairs = detect_conflicts(crossings, conflict_params(opt), opt.jobs);
    const auto cumulative = cumulative_by_separation(pairs, opt.max_sep_s);
    log_info(std::to_string(pairs.size()) + " conflict pairs in " +
             std::to_string(crossings.size()) + " crossings");

    Manifest manifest("conflicts", opt);
    manifest.input(use_m3 ? "m3" : "m1", path);
    manifest.param("max-sep", opt.max_sep_s);
    manifest.param("min-fl", opt.min_fl);
    manifest.param("jobs", opt.jobs);

    const fs::path out(opt.out_dir);
    manifest.output(out, "conflicts.csv", conflicts_csv(pairs));
    manifest.output(out, "cumulative.csv", cumulative_csv(cumulative));
    manifest.save();
}

void sweep_params(Manifest& manifest, const Options& opt) {
    manifest.param("max-sep", opt.max_sep_s);
    manifest.param("min-fl", opt.min_fl);
    manifest.param("sweep-step", opt.sweep_step_s);
    manifest.param("sweep-max", opt.sweep_max);
    manifest.param("estimator", opt.estimator);
    manifest.param("epsilon", opt.epsilon);
    manifest.param("granularity", opt.granularity);
    manifest.param("density-denominator", opt.density_denominator);
    manifest.param("jobs", opt.jobs);
}

void run_sweep_like(const Options& opt, bool emit_filtered, bool emit_conflicts) {
    const std::string subcommand =
        emit_conflicts ? "pipeline" : (emit_filtered ? "filter" : "sweep");

    const TrajectoryDataset m1 = parse_segment_file(read_file(opt.m1_path));
    const TrajectoryDataset m3 = parse_segment_file(read_file(opt.m3_path));

    Manifest manifest(subcommand, opt);
    manifest.input("m1", opt.m1_path);
    manifest.input("m3", opt.m3_path);
    sweep_params(manifest, opt);

    const fs::path out(opt.out_dir);
    const ConflictParams params = conflict_params(opt);

    if (emit_conflicts) {
        const auto crossings = derive_crossings(m3);
        const auto before = detect_conflicts(crossings, params, opt.jobs);
        log_info("conflicts before filtering: " + std::to_string(before.size()));
        manifest.output(out, "conflicts_before.csv", conflicts_csv(before));
        manifest.output(out, "cumulative_before.csv",
                        cumulative_csv(cumulative_by_separation(before, opt.max_sep_s)));
    }

    const auto deviations = compute_deviations(m1, m3);
    const auto thresholds = thresholds_of(opt, deviations);
    SweepOptions sweep_options{params, granularity_of(opt), denominator_of(opt), opt.jobs};
    const auto points = sweep(m1, m3, thresholds, sweep_options);
    manifest.output(out, "sweep.csv", sweep_csv(points));

    // NoTransition propagates as a data error; sweep.csv is already on disk.
    const ThresholdEstimate estimate = estimate_threshold(points, estimator_of(opt), opt.epsilon);
    log_info("estimated update threshold: " + std::to_string(estimate.delta_t_s) + " s");
    manifest.output(out, "estimate.json", estimate_json(estimate));

    if (emit_filtered) {
        const TrajectoryDataset kept =
            filter_at(m3, deviations, estimate.delta_t_s, granularity_of(opt));
        log_info("kept " + std::to_string(kept.segments.size()) + " of " +
                 std::to_string(m3.segments.size()) + " executed segments");
        manifest.output(out, "filtered.seg", write_segment_file(kept));

        if (emit_conflicts) {
            const auto crossings = derive_crossings(kept);
            const auto after = detect_conflicts(crossings, params, opt.jobs);
            log_info("conflicts after filtering: " + std::to_string(after.size()));
            manifest.output(out, "conflicts_after.csv", conflicts_csv(after));
            manifest.output(out, "cumulative_after.csv",
                            cumulative_csv(cumulative_by_separation(after, opt.max_sep_s)));
        }
    }
    manifest.save();
}

}  // namespace

int main(int argc, char** argv) {
    init_log_level();

    CLI::App app{"Detects and removes ghost trajectories from paired planned/executed "
                 "4D-trajectory segment files by sweeping a time-deviation threshold and "
                 "locating the phase transition in conflict density."};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    Options opt;

    const auto sweep_max_check = CLI::Validator(
        [](std::string& value) -> std::string {
            if (value == "auto") return {};
            if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
                return "must be 'auto' or a non-negative integer";
            }
            return {};
        },
        "INT|auto");

    auto add_inputs = [&](CLI::App* cmd) {
        cmd->add_option("--m1", opt.m1_path, "planned (last filed flight plan) SEG file")
            ->required();
        cmd->add_option("--m3", opt.m3_path, "executed (radar-corrected) SEG file")->required();
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("-o,--out", opt.out_dir, "output directory");
    };
    auto add_conflict_flags = [&](CLI::App* cmd) {
        cmd->add_option("--max-sep", opt.max_sep_s,
                        "loss-of-separation window in seconds (strict upper bound)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--min-fl", opt.min_fl, "flight-level floor (FL 200 = 20 000 ft)")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--jobs", opt.jobs, "worker threads; results are schedule-independent")
            ->check(CLI::PositiveNumber);
    };
    auto add_sweep_flags = [&](CLI::App* cmd) {
        cmd->add_option("--sweep-step", opt.sweep_step_s, "candidate threshold step in seconds")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--sweep-max", opt.sweep_max,
                        "largest candidate threshold in seconds, or 'auto' for twice the "
                        "largest finite deviation")
            ->check(sweep_max_check);
        cmd->add_option("--estimator", opt.estimator, "phase-transition estimator")
            ->check(CLI::IsMember({"first-below-eps", "largest-drop"}));
        cmd->add_option("--epsilon", opt.epsilon,
                        "density cutoff (first-below-eps) or relative-drop guard (largest-drop)");
        cmd->add_option("--granularity", opt.granularity,
                        "drop individual segments or whole flights")
            ->check(CLI::IsMember({"segment", "flight"}));
        cmd->add_option("--density-denominator", opt.density_denominator,
                        "square of kept segments or of distinct flights")
            ->check(CLI::IsMember({"segments", "flights"}));
    };

    CLI::App* cmd_generate =
        app.add_subcommand("generate", "Write a synthetic m1/m3 pair with planted ground truth");
    cmd_generate->add_option("--seed", opt.seed, "PRNG seed; equal seeds give identical bytes");
    cmd_generate->add_option("--flights", opt.flights, "number of flights")
        ->check(CLI::PositiveNumber);
    add_out(cmd_generate);

    CLI::App* cmd_stats = app.add_subcommand(
        "stats", "Daily counts, duration histogram and mean-duration grids for one day");
    add_inputs(cmd_stats);
    add_out(cmd_stats);

    CLI::App* cmd_conflicts =
        app.add_subcommand("conflicts", "Detect losses of separation in one SEG file");
    cmd_conflicts->add_option("--m1", opt.m1_path, "planned SEG file (use exactly one input)");
    cmd_conflicts->add_option("--m3", opt.m3_path, "executed SEG file (use exactly one input)");
    add_out(cmd_conflicts);
    add_conflict_flags(cmd_conflicts);

    CLI::App* cmd_sweep = app.add_subcommand(
        "sweep", "Sweep candidate thresholds and estimate the provider's update threshold");
    add_inputs(cmd_sweep);
    add_out(cmd_sweep);
    add_conflict_flags(cmd_sweep);
    add_sweep_flags(cmd_sweep);

    CLI::App* cmd_filter = app.add_subcommand(
        "filter", "Estimate the update threshold and write the ghost-filtered dataset");
    add_inputs(cmd_filter);
    add_out(cmd_filter);
    add_conflict_flags(cmd_filter);
    add_sweep_flags(cmd_filter);

    CLI::App* cmd_pipeline = app.add_subcommand(
        "pipeline", "Conflicts before, threshold sweep and estimate, filtered dataset, "
                    "conflicts after — the full cleaning run");
    add_inputs(cmd_pipeline);
    add_out(cmd_pipeline);
    add_conflict_flags(cmd_pipeline);
    add_sweep_flags(cmd_pipeline);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*cmd_conflicts && (opt.m1_path.empty() == opt.m3_path.empty())) {
        std::fprintf(stderr, "conflicts: give exactly one of --m1 or --m3\n");
        return 1;
    }

    try {
        if (*cmd_generate) run_generate(opt);
        else if (*cmd_stats) run_stats(opt);
        else if (*cmd_conflicts) run_conflicts(opt);
        else if (*cmd_sweep) run_sweep_like(opt, false, false);
        else if (*cmd_filter) run_sweep_like(opt, true, false);
        else if (*cmd_pipeline) run_sweep_like(opt, true, true);
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
