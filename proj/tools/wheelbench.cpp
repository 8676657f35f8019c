// wheelbench: benchmark runner and utilities.

#include "wheelbench/bench.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

using namespace wheelbench;
using bench::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

class Invalid : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_json(const json& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

geom::Pose pose_arg(const std::vector<double>& v, const char* what) {
    if (v.size() != 3) {
        throw Invalid(std::string(what) + " needs x,y,theta");
    }
    return {v[0], v[1], v[2]};
}

std::pair<int, int> size_arg(const std::string& s) {
    int w = 0;
    int h = 0;
    char sep = 0;
    if (std::sscanf(s.c_str(), "%d%c%d", &w, &sep, &h) != 3 || (sep != 'x' && sep != 'X') || w <= 0 || h <= 0) {
        throw Invalid("--size must be WxH, got " + s);
    }
    return {w, h};
}

struct RunOpts {
    std::string config;
    std::string out;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
};

int cmd_run(const RunOpts& o) {
    bench::BenchmarkConfig cfg = bench::load_config(o.config);
    if (o.workers) {
        cfg.workers = *o.workers;
    }
    if (o.seed) {
        cfg.base_seed = *o.seed;
    }
    cfg.validate();
    const bench::ResultSet rs = bench::run_experiment(cfg);
    bench::write_results(rs, o.out);
    std::size_t errors = 0;
    for (const bench::RunRecord& r : rs.runs) {
        errors += r.status == bench::RunStatus::Error;
    }
    std::cerr << rs.runs.size() << " runs (" << errors << " errors) in " << rs.execution.elapsed << " s -> " << o.out
              << '\n';
    return kOk;
}

struct GenOpts {
    std::string kind;
    std::uint64_t seed = 0;
    std::string size = "100x100";
    int radius = 4;
    int iterations = 40;
    double density = 0.01;
    std::string out;
};

int cmd_gen_env(const GenOpts& o) {
    const auto [w, h] = size_arg(o.size);
    env::GeneratedGrid g{env::GridEnv(1, 1), {}, {}};
    json params;
    if (o.kind == "corridor") {
        if (o.radius < 1) {
            throw Invalid("--radius must be positive");
        }
        g = env::gen_corridor_env(o.seed, {w, h, o.radius, o.iterations});
        params = {{"generator", "corridor"},
                  {"width", w},
                  {"height", h},
                  {"radius", o.radius},
                  {"iterations", o.iterations}};
    } else {
        if (!(o.density >= 0.0 && o.density < 1.0)) {
            throw Invalid("--density must lie in [0, 1)");
        }
        g = env::gen_density_scenario(o.seed, w, h, o.density);
        params = {{"generator", "density"}, {"width", w}, {"height", h}, {"density", o.density}};
    }
    write_json(env::grid_to_json(g.grid, g.start, g.goal, o.seed, params), o.out);
    return kOk;
}

struct SteerOpts {
    std::string steer;
    std::vector<double> from;
    std::vector<double> to;
    std::optional<double> radius;
    std::optional<double> resolution;
    std::string out;
};

int cmd_steer(const SteerOpts& o) {
    steer::SteerConfig cfg;
    if (o.radius) {
        cfg.turning_radius = *o.radius;
        cfg.omega_max = cfg.v_max / *o.radius;
    }
    if (o.resolution) {
        cfg.sample_resolution = *o.resolution;
    }
    steer::SteerKind kind{};
    try {
        cfg.validate();
        kind = steer::parse_steer_kind(o.steer);
    } catch (const std::exception& e) {
        throw Invalid(e.what());
    }
    const geom::Pose a = pose_arg(o.from, "--from");
    const geom::Pose b = pose_arg(o.to, "--to");
    steer::SteeredPath path;
    switch (kind) {
        case steer::SteerKind::Dubins:
            path = steer::dubins_steer(a, b, cfg);
            break;
        case steer::SteerKind::ReedsShepp:
            path = steer::reeds_shepp_steer(a, b, cfg);
            break;
        case steer::SteerKind::Posq:
            path = steer::posq_steer(a, b, cfg);
            break;
    }
    json doc = bench::path_to_json(path, cfg.sample_resolution);
    doc["steer"] = std::string(steer::to_string(kind));
    doc["config"] = bench::steer_config_to_json(cfg);
    doc["terminal_heading_error"] = geom::angle_diff(path.end().theta(), b.theta());
    write_json(doc, o.out);
    return kOk;
}

struct SmoothOpts {
    std::string method;
    std::string path;
    std::string env;
    std::string out;
    std::string model = "point";
    std::string steer = "reeds-shepp";
    double radius = 1.0;
    std::uint64_t seed = 0;
    double time_budget = 5.0;
    double check_resolution = 0.0;
};

int cmd_smooth(const SmoothOpts& o) {
    std::string method = o.method;
    std::replace(method.begin(), method.end(), '-', '_');
    steer::SteerConfig cfg;
    cfg.turning_radius = o.radius;
    cfg.omega_max = cfg.v_max / o.radius;
    smoothing::SmootherParams params;
    params.rng_seed = o.seed;
    params.time_budget = o.time_budget;
    std::optional<steer::SteerFunction> steer_fn;
    std::optional<collision::CollisionModel> model;
    try {
        cfg.validate();
        params.validate();
        steer_fn.emplace(steer::parse_steer_kind(o.steer), cfg);
        model = collision::CollisionModel::named(o.model);
    } catch (const std::exception& e) {
        throw Invalid(e.what());
    }
    env::PolygonScene scene;
    steer::SteeredPath input;
    try {
        scene = env::load_environment_file(o.env);
        input = bench::path_from_json(json::parse(env::read_text_file(o.path)));
    } catch (const json::exception& e) {
        throw Invalid(o.path + ": " + e.what());
    } catch (const env::EnvError& e) {
        throw Invalid(e.what());
    } catch (const bench::SchemaError& e) {
        throw Invalid(e.what());
    }
    collision::ValidityChecker checker(scene.env, *model, o.check_resolution);
    smoothing::SmoothResult r;
    try {
        r = smoothing::smooth(method, input, checker, *steer_fn, params);
    } catch (const std::invalid_argument& e) {
        throw Invalid(e.what());
    }
    json doc = bench::path_to_json(r.path, cfg.sample_resolution);
    doc["smoothing"] = {{"method", method},
                        {"time", r.time},
                        {"length_before", r.length_before},
                        {"length_after", r.length_after},
                        {"max_curvature_before", r.max_curvature_before},
                        {"max_curvature_after", r.max_curvature_after},
                        {"input_invalid", r.input_invalid}};
    write_json(doc, o.out);
    if (r.input_invalid) {
        std::cerr << "input path is not collision free; returned unchanged\n";
    }
    return kOk;
}

int cmd_aggregate(const std::string& results, const std::string& format) {
    bench::ResultSet rs;
    try {
        rs = bench::read_results(results);
    } catch (const bench::SchemaError& e) {
        throw Invalid(e.what());
    }
    if (rs.runs.empty()) {
        throw Invalid(results + ": no runs");
    }
    const auto rows = bench::aggregate(rs);
    std::cout << (format == "csv" ? bench::format_csv(rows) : bench::format_markdown(rows));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark for motion planning of wheeled robots in SE(2)"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bench::tool_version());

    RunOpts run;
    auto* run_cmd = app.add_subcommand("run", "Run a benchmark configuration");
    run_cmd->add_option("--config", run.config, "Config JSON")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run.out, "Result JSON")->required();
    run_cmd->add_option("--workers", run.workers, "Parallel runs");
    run_cmd->add_option("--seed", run.seed, "Base seed");

    GenOpts gen;
    auto* gen_cmd = app.add_subcommand("gen-env", "Generate a grid environment");
    gen_cmd->add_option("kind", gen.kind, "corridor or density")
        ->required()
        ->check(CLI::IsMember({"corridor", "density"}));
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--size", gen.size, "Grid size WxH")->capture_default_str();
    auto* radius_opt = gen_cmd->add_option("--radius", gen.radius, "Corridor radius in cells")->capture_default_str();
    gen_cmd->add_option("--iterations", gen.iterations, "Corridor exploration steps")->capture_default_str();
    auto* density_opt = gen_cmd->add_option("--density", gen.density, "Occupied fraction")->capture_default_str();
    radius_opt->excludes(density_opt);
    gen_cmd->add_option("--out", gen.out, "Output JSON")->required();

    SteerOpts st;
    auto* steer_cmd = app.add_subcommand("steer", "Connect two poses with a steer function");
    steer_cmd->add_option("--steer", st.steer, "dubins, reeds-shepp or posq")
        ->required()
        ->check(CLI::IsMember({"dubins", "reeds-shepp", "reeds_shepp", "posq"}));
    steer_cmd->add_option("--from", st.from, "x,y,theta")->required()->delimiter(',')->expected(3);
    steer_cmd->add_option("--to", st.to, "x,y,theta")->required()->delimiter(',')->expected(3);
    steer_cmd->add_option("--radius", st.radius, "Turning radius");
    steer_cmd->add_option("--resolution", st.resolution, "Sample spacing");
    steer_cmd->add_option("--out", st.out, "Output JSON")->required();

    SmoothOpts sm;
    auto* smooth_cmd = app.add_subcommand("smooth", "Post-smooth a path");
    smooth_cmd->add_option("--method", sm.method, "shortcut, bspline, simplify-max or grips")
        ->required()
        ->check(CLI::IsMember({"shortcut", "bspline", "simplify-max", "simplify_max", "grips"}));
    smooth_cmd->add_option("--path", sm.path, "Path JSON")->required()->check(CLI::ExistingFile);
    smooth_cmd->add_option("--env", sm.env, "Environment file")->required()->check(CLI::ExistingFile);
    smooth_cmd->add_option("--out", sm.out, "Output JSON")->required();
    smooth_cmd->add_option("--model", sm.model, "point, car or warehouse_bot")->capture_default_str();
    smooth_cmd->add_option("--steer", sm.steer, "Steer function for reconnections")->capture_default_str();
    smooth_cmd->add_option("--radius", sm.radius, "Turning radius")->capture_default_str();
    smooth_cmd->add_option("--seed", sm.seed, "Smoother seed");
    smooth_cmd->add_option("--time-budget", sm.time_budget, "Seconds")->capture_default_str();
    smooth_cmd->add_option("--check-resolution", sm.check_resolution, "Collision check spacing, 0 for default");

    std::string results;
    std::string format = "md";
    auto* agg_cmd = app.add_subcommand("aggregate", "Summarize a result file");
    agg_cmd->add_option("--results", results, "Result JSON")->required()->check(CLI::ExistingFile);
    agg_cmd->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*gen_cmd) return cmd_gen_env(gen);
        if (*steer_cmd) return cmd_steer(st);
        if (*smooth_cmd) return cmd_smooth(sm);
        if (*agg_cmd) return cmd_aggregate(results, format);
    } catch (const Invalid& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const bench::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return kRuntime;
    }
    return kInvalid;
}
