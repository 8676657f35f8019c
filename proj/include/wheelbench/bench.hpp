#pragma once

#include "wheelbench/collision.hpp"
#include "wheelbench/env.hpp"
#include "wheelbench/metrics.hpp"
#include "wheelbench/planners.hpp"
#include "wheelbench/smoothing.hpp"
#include "wheelbench/steer.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wheelbench::bench {

using nlohmann::json;

/// Invalid configuration; raised before any run starts.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or incompatible result file.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

/// Version string written into every result file.
std::string tool_version();

struct PlannerEntry {
    std::string name;   ///< registry name
    std::string label;  ///< name in the results; defaults to `name`
    planners::PlannerParams params{};
};

struct SmootherEntry {
    std::string name;
    smoothing::SmootherParams params{};
};

struct BenchmarkConfig {
    /// Scenario specs as written: {"file"}, {"scene"}, {"generator"},
    /// {"movingai"} or {"inline"}.
    std::vector<json> scenarios;
    std::vector<PlannerEntry> planners;
    steer::SteerKind steer = steer::SteerKind::ReedsShepp;
    steer::SteerConfig steer_config{};
    std::vector<SmootherEntry> smoothers;
    std::string collision_model = "point";
    double check_resolution = 0.0;
    planners::GoalTolerance goal_tolerance{};
    double time_limit = 1.0;
    int repetitions = 1;
    std::uint64_t base_seed = 0;
    int workers = 1;
    double hard_kill_factor = 2.0;
    /// Seed of the execution order shuffle; derived from base_seed when absent.
    std::optional<std::uint64_t> order_seed;
    /// Directory against which relative file references are resolved.
    std::string base_dir = ".";

    /// Throws ConfigError.
    void validate() const;
};

/// Parses and validates a config document. Throws ConfigError.
BenchmarkConfig config_from_json(const json& doc, const std::string& base_dir = ".");
BenchmarkConfig load_config(const std::string& path);
/// Normalized config with every default spelled out; excludes workers and base_dir.
json config_to_json(const BenchmarkConfig& cfg);

/// Loads every scenario referenced by the config, in config order. Names must
/// be unique. Throws ConfigError.
std::vector<env::Scenario> resolve_scenarios(const BenchmarkConfig& cfg);

/// Seed of run i: mix64(base_seed + i).
std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t index);

enum class RunStatus { Ok, Timeout, Killed, Error };

std::string_view to_string(RunStatus s);
RunStatus parse_run_status(std::string_view s);

struct RunRecord {
    std::string scenario;
    std::string planner;
    std::string steer;
    std::optional<std::string> smoother;
    int repetition = 0;
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::Ok;
    /// Error text for status Error.
    std::optional<std::string> message;
    /// Planner outcome ("solved", "timeout", ...); absent when killed or failed.
    std::optional<std::string> planner_status;
    std::optional<double> time_to_first;
    metrics::MetricsRecord metrics{};
    std::optional<metrics::MetricsRecord> metrics_smoothed;
    std::optional<double> smoothing_time;
    std::vector<std::pair<double, double>> solution_history;
    /// Wall-clock time of the run as seen by the harness.
    double elapsed = 0.0;
};

struct ExecutionInfo {
    int workers = 1;
    std::uint64_t order_seed = 0;
    std::string started;
    std::string finished;
    double elapsed = 0.0;
};

struct ResultSet {
    json config;
    std::string tool_version;
    std::vector<RunRecord> runs;
    ExecutionInfo execution{};
};

/// Records sort by (scenario, planner, smoother, repetition).
bool canonical_less(const RunRecord& a, const RunRecord& b);

/// Runs the (scenario x planner x repetition) grid on `workers` threads. Each
/// run has a soft deadline of time_limit; a run that has not returned after
/// hard_kill_factor x time_limit is recorded as killed and its thread abandoned.
/// With smoothers, each plan is smoothed by every smoother and yields one record
/// per smoother. Throws ConfigError before any run starts.
ResultSet run_experiment(const BenchmarkConfig& cfg);

json to_json(const ResultSet& rs);
/// Throws SchemaError on a missing key, wrong type or other schema version.
ResultSet from_json(const json& doc);
void write_results(const ResultSet& rs, const std::string& path);
ResultSet read_results(const std::string& path);

/// Result document with every wall-clock field removed.
json strip_wall_clock(json doc);

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation; 0 for a single value
    int count = 0;
};

struct SummaryRow {
    std::string planner;
    std::string steer;
    std::optional<std::string> smoother;
    int runs = 0;
    int found = 0;
    /// Collision free and exact.
    int valid = 0;
    std::optional<Stat> time;
    std::optional<Stat> length;
    std::optional<Stat> max_curvature;
    std::optional<Stat> mean_curvature;
    std::optional<Stat> mean_clearance;
    /// Sum over found paths; absent without any.
    std::optional<long long> cusps;

    /// "valid / found", or "0" when nothing was found.
    [[nodiscard]] std::string solutions() const;
};

/// One row per (planner, steer, smoother) in canonical order. Records with a
/// smoother contribute their smoothed metrics.
std::vector<SummaryRow> aggregate(const ResultSet& rs);
std::string format_csv(const std::vector<SummaryRow>& rows);
std::string format_markdown(const std::vector<SummaryRow>& rows);

json metrics_to_json(const metrics::MetricsRecord& m);
metrics::MetricsRecord metrics_from_json(const json& j);

/// Path document: start, end, length, segments and samples at `resolution`.
json path_to_json(const steer::SteeredPath& path, double resolution);
/// Rebuilds the path from its start and segments. Throws SchemaError.
steer::SteeredPath path_from_json(const json& doc);

planners::PlannerParams planner_params_from_json(const json& j);
json planner_params_to_json(const planners::PlannerParams& p);
smoothing::SmootherParams smoother_params_from_json(const json& j);
json smoother_params_to_json(const smoothing::SmootherParams& p);
steer::SteerConfig steer_config_from_json(const json& j);
json steer_config_to_json(const steer::SteerConfig& c);

}  // namespace wheelbench::bench
