#include "wheelbench/bench.hpp"

#include "wheelbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <set>

namespace wheelbench::bench {

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
    if (!j.is_object()) {
        throw ConfigError(what + " must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(what + ": unknown key \"" + key + "\"");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& what) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(what + ": \"" + key + "\" has the wrong type");
    }
}

std::string resolve_path(const std::string& base_dir, const std::string& file) {
    const std::filesystem::path p(file);
    return p.is_absolute() ? file : (std::filesystem::path(base_dir) / p).string();
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<env::Scenario> generated(const json& spec) {
    check_keys(spec, {"generator", "seed", "params", "name"}, "generator scenario");
    const std::string gen = spec.at("generator").get<std::string>();
    std::uint64_t seed = 0;
    read(spec, "seed", seed, "generator scenario");
    const json params = spec.value("params", json::object());
    env::GeneratedGrid g{env::GridEnv(1, 1), {}, {}};
    std::string name;
    if (gen == "corridor") {
        check_keys(params, {"width", "height", "radius", "iterations"}, "corridor params");
        env::CorridorParams cp;
        read(params, "width", cp.width, "corridor params");
        read(params, "height", cp.height, "corridor params");
        read(params, "radius", cp.corridor_radius, "corridor params");
        read(params, "iterations", cp.iterations, "corridor params");
        g = env::gen_corridor_env(seed, cp);
        name = "corridor-r" + std::to_string(cp.corridor_radius) + "-s" + std::to_string(seed);
    } else if (gen == "density") {
        check_keys(params, {"width", "height", "density"}, "density params");
        int w = 100;
        int h = 100;
        double d = 0.01;
        read(params, "width", w, "density params");
        read(params, "height", h, "density params");
        read(params, "density", d, "density params");
        g = env::gen_density_scenario(seed, w, h, d);
        name = "density-" + format_number(d) + "-s" + std::to_string(seed);
    } else {
        throw ConfigError("unknown generator: " + gen);
    }
    if (spec.contains("name")) {
        name = spec.at("name").get<std::string>();
    }
    auto e = std::make_shared<const env::Environment>(std::move(g.grid));
    return {env::Scenario{name, e, g.start, g.goal, std::nullopt}};
}

std::vector<env::Scenario> from_file(const json& spec, const std::string& base_dir) {
    check_keys(spec, {"file", "scenarios"}, "file scenario");
    const std::string path = resolve_path(base_dir, spec.at("file").get<std::string>());
    env::PolygonScene scene = env::load_environment_file(path);
    if (scene.scenarios.empty()) {
        throw ConfigError(path + ": no scenarios");
    }
    if (!spec.contains("scenarios")) {
        return scene.scenarios;
    }
    std::vector<env::Scenario> out;
    for (const auto& n : spec.at("scenarios")) {
        const std::string name = n.get<std::string>();
        const auto it = std::find_if(scene.scenarios.begin(), scene.scenarios.end(),
                                     [&](const env::Scenario& s) { return s.name == name; });
        if (it == scene.scenarios.end()) {
            throw ConfigError(path + ": no scenario named " + name);
        }
        out.push_back(*it);
    }
    return out;
}

std::vector<env::Scenario> from_movingai(const json& spec, const std::string& base_dir) {
    check_keys(spec, {"map", "scen", "hardest", "headings"}, "movingai scenario");
    const std::string headings = spec.value("headings", std::string("zero"));
    if (headings != "zero" && headings != "face_goal") {
        throw ConfigError("movingai headings must be zero or face_goal");
    }
    const std::string map_path = resolve_path(base_dir, spec.at("map").get<std::string>());
    const std::string scen_path = resolve_path(base_dir, spec.at("scen").get<std::string>());
    auto grid = std::make_shared<const env::Environment>(env::parse_movingai_map(env::read_text_file(map_path)));
    auto scens = env::parse_movingai_scen(env::read_text_file(scen_path), grid);
    if (spec.contains("hardest")) {
        scens = env::select_hardest(scens, spec.at("hardest").get<std::size_t>());
    }
    if (headings == "face_goal") {
        for (auto& sc : scens) {
            const double th = std::atan2(sc.goal.y() - sc.start.y(), sc.goal.x() - sc.start.x());
            sc.start = geom::Pose(sc.start.x(), sc.start.y(), th);
            sc.goal = geom::Pose(sc.goal.x(), sc.goal.y(), th);
        }
    }
    return scens;
}

std::vector<env::Scenario> from_inline(const json& spec, std::size_t index) {
    check_keys(spec, {"inline", "name"}, "inline scenario");
    const json& doc = spec.at("inline");
    const std::string name = spec.value("name", "inline#" + std::to_string(index));
    if (doc.contains("bounds")) {
        return env::load_polygon_env(doc.dump(), false, name).scenarios;
    }
    env::GeneratedGrid g = env::grid_from_json(doc);
    auto e = std::make_shared<const env::Environment>(std::move(g.grid));
    return {env::Scenario{name, e, g.start, g.goal, std::nullopt}};
}

}  // namespace

planners::PlannerParams planner_params_from_json(const json& j) {
    planners::PlannerParams p;
    const std::string what = "planner params";
    check_keys(j,
               {"goal_bias", "max_steer_extension", "rewire_neighbors", "rewire_factor", "roadmap_k", "k_prm",
                "max_iterations", "lattice"},
               what);
    read(j, "goal_bias", p.goal_bias, what);
    read(j, "max_steer_extension", p.max_steer_extension, what);
    read(j, "rewire_neighbors", p.rewire_neighbors, what);
    read(j, "rewire_factor", p.rewire_factor, what);
    read(j, "roadmap_k", p.roadmap_k, what);
    read(j, "k_prm", p.k_prm, what);
    read(j, "max_iterations", p.max_iterations, what);
    if (j.contains("lattice")) {
        const json& l = j.at("lattice");
        check_keys(l, {"weights", "heading_bins", "resolution"}, "lattice params");
        read(l, "weights", p.lattice.weights, "lattice params");
        read(l, "heading_bins", p.lattice.heading_bins, "lattice params");
        read(l, "resolution", p.lattice.resolution, "lattice params");
    }
    return p;
}

json planner_params_to_json(const planners::PlannerParams& p) {
    return {{"goal_bias", p.goal_bias},
            {"max_steer_extension", p.max_steer_extension},
            {"rewire_neighbors", p.rewire_neighbors},
            {"rewire_factor", p.rewire_factor},
            {"roadmap_k", p.roadmap_k},
            {"k_prm", p.k_prm},
            {"max_iterations", p.max_iterations},
            {"lattice",
             {{"weights", p.lattice.weights},
              {"heading_bins", p.lattice.heading_bins},
              {"resolution", p.lattice.resolution}}}};
}

smoothing::SmootherParams smoother_params_from_json(const json& j) {
    smoothing::SmootherParams p;
    const std::string what = "smoother params";
    check_keys(j, {"shortcut_rounds", "bspline_rounds", "grips", "time_budget"}, what);
    read(j, "shortcut_rounds", p.shortcut_rounds, what);
    read(j, "bspline_rounds", p.bspline_rounds, what);
    read(j, "time_budget", p.time_budget, what);
    if (j.contains("grips")) {
        const json& g = j.at("grips");
        check_keys(g, {"eta", "gradient_eps", "descent_rounds", "min_node_spacing"}, "grips params");
        read(g, "eta", p.grips.eta, "grips params");
        read(g, "gradient_eps", p.grips.gradient_eps, "grips params");
        read(g, "descent_rounds", p.grips.descent_rounds, "grips params");
        read(g, "min_node_spacing", p.grips.min_node_spacing, "grips params");
    }
    return p;
}

json smoother_params_to_json(const smoothing::SmootherParams& p) {
    return {{"shortcut_rounds", p.shortcut_rounds},
            {"bspline_rounds", p.bspline_rounds},
            {"time_budget", p.time_budget},
            {"grips",
             {{"eta", p.grips.eta},
              {"gradient_eps", p.grips.gradient_eps},
              {"descent_rounds", p.grips.descent_rounds},
              {"min_node_spacing", p.grips.min_node_spacing}}}};
}

steer::SteerConfig steer_config_from_json(const json& j) {
    steer::SteerConfig c;
    const std::string what = "steer config";
    check_keys(j,
               {"name", "turning_radius", "v_max", "omega_max", "sample_resolution", "posq_gains", "posq_dt",
                "posq_goal_eps", "posq_max_time", "curvature_rate"},
               what);
    read(j, "turning_radius", c.turning_radius, what);
    read(j, "v_max", c.v_max, what);
    read(j, "omega_max", c.omega_max, what);
    read(j, "sample_resolution", c.sample_resolution, what);
    read(j, "posq_dt", c.posq_dt, what);
    read(j, "posq_goal_eps", c.posq_goal_eps, what);
    read(j, "posq_max_time", c.posq_max_time, what);
    read(j, "curvature_rate", c.curvature_rate, what);
    if (j.contains("posq_gains")) {
        const json& g = j.at("posq_gains");
        check_keys(g, {"k_rho", "k_alpha", "k_phi", "k_v"}, "posq gains");
        read(g, "k_rho", c.posq_gains.k_rho, "posq gains");
        read(g, "k_alpha", c.posq_gains.k_alpha, "posq gains");
        read(g, "k_phi", c.posq_gains.k_phi, "posq gains");
        read(g, "k_v", c.posq_gains.k_v, "posq gains");
    }
    return c;
}

json steer_config_to_json(const steer::SteerConfig& c) {
    return {{"turning_radius", c.turning_radius},
            {"v_max", c.v_max},
            {"omega_max", c.omega_max},
            {"sample_resolution", c.sample_resolution},
            {"posq_gains",
             {{"k_rho", c.posq_gains.k_rho},
              {"k_alpha", c.posq_gains.k_alpha},
              {"k_phi", c.posq_gains.k_phi},
              {"k_v", c.posq_gains.k_v}}},
            {"posq_dt", c.posq_dt},
            {"posq_goal_eps", c.posq_goal_eps},
            {"posq_max_time", c.posq_max_time},
            {"curvature_rate", c.curvature_rate}};
}

void BenchmarkConfig::validate() const {
    if (!(time_limit > 0.0) || !std::isfinite(time_limit)) {
        throw ConfigError("time_limit must be positive");
    }
    if (workers < 1) {
        throw ConfigError("workers must be at least 1");
    }
    if (repetitions < 1) {
        throw ConfigError("repetitions must be at least 1");
    }
    if (!(hard_kill_factor >= 1.0)) {
        throw ConfigError("hard_kill_factor must be at least 1");
    }
    if (scenarios.empty()) {
        throw ConfigError("no scenarios");
    }
    if (planners.empty()) {
        throw ConfigError("no planners");
    }
    std::set<std::string> labels;
    for (const PlannerEntry& p : planners) {
        if (!planners::Registry::instance().contains(p.name)) {
            throw ConfigError("unknown planner: " + p.name);
        }
        if (!labels.insert(p.label).second) {
            throw ConfigError("duplicate planner label: " + p.label);
        }
        try {
            p.params.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(p.label + ": " + e.what());
        }
    }
    std::set<std::string> smoother_names;
    const auto known = smoothing::smoother_names();
    for (const SmootherEntry& s : smoothers) {
        if (std::find(known.begin(), known.end(), s.name) == known.end()) {
            throw ConfigError("unknown smoother: " + s.name);
        }
        if (!smoother_names.insert(s.name).second) {
            throw ConfigError("duplicate smoother: " + s.name);
        }
        try {
            s.params.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(s.name + ": " + e.what());
        }
    }
    try {
        steer_config.validate();
        (void)collision::CollisionModel::named(collision_model);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (check_resolution < 0.0) {
        throw ConfigError("check_resolution must not be negative");
    }
    if (!(goal_tolerance.position >= 0.0) || !(goal_tolerance.heading >= 0.0)) {
        throw ConfigError("goal tolerance must not be negative");
    }
}

BenchmarkConfig config_from_json(const json& doc, const std::string& base_dir) {
    check_keys(doc,
               {"scenarios", "planners", "steer", "smoothers", "collision", "goal_tolerance", "time_limit",
                "repetitions", "base_seed", "workers", "hard_kill_factor", "order_seed"},
               "config");
    BenchmarkConfig cfg;
    cfg.base_dir = base_dir;
    try {
        if (!doc.contains("scenarios") || !doc.at("scenarios").is_array()) {
            throw ConfigError("config: \"scenarios\" must be a list");
        }
        cfg.scenarios = doc.at("scenarios").get<std::vector<json>>();
        if (!doc.contains("planners") || !doc.at("planners").is_array()) {
            throw ConfigError("config: \"planners\" must be a list");
        }
        for (const json& p : doc.at("planners")) {
            PlannerEntry e;
            if (p.is_string()) {
                e.name = p.get<std::string>();
            } else {
                check_keys(p, {"name", "label", "params"}, "planner entry");
                e.name = p.at("name").get<std::string>();
                if (p.contains("params")) {
                    e.params = planner_params_from_json(p.at("params"));
                }
            }
            e.label = p.is_object() ? p.value("label", e.name) : e.name;
            cfg.planners.push_back(std::move(e));
        }
        if (doc.contains("steer")) {
            const json& s = doc.at("steer");
            if (s.is_string()) {
                cfg.steer = steer::parse_steer_kind(s.get<std::string>());
            } else {
                cfg.steer = steer::parse_steer_kind(s.at("name").get<std::string>());
                cfg.steer_config = steer_config_from_json(s);
            }
        }
        for (const json& s : doc.value("smoothers", json::array())) {
            SmootherEntry e;
            if (s.is_string()) {
                e.name = s.get<std::string>();
            } else {
                check_keys(s, {"name", "params"}, "smoother entry");
                e.name = s.at("name").get<std::string>();
                if (s.contains("params")) {
                    e.params = smoother_params_from_json(s.at("params"));
                }
            }
            std::replace(e.name.begin(), e.name.end(), '-', '_');
            cfg.smoothers.push_back(std::move(e));
        }
        if (doc.contains("collision")) {
            const json& c = doc.at("collision");
            check_keys(c, {"model", "check_resolution"}, "collision");
            read(c, "model", cfg.collision_model, "collision");
            read(c, "check_resolution", cfg.check_resolution, "collision");
        }
        if (doc.contains("goal_tolerance")) {
            const json& g = doc.at("goal_tolerance");
            check_keys(g, {"position", "heading"}, "goal_tolerance");
            read(g, "position", cfg.goal_tolerance.position, "goal_tolerance");
            read(g, "heading", cfg.goal_tolerance.heading, "goal_tolerance");
        }
        read(doc, "time_limit", cfg.time_limit, "config");
        read(doc, "repetitions", cfg.repetitions, "config");
        read(doc, "base_seed", cfg.base_seed, "config");
        read(doc, "workers", cfg.workers, "config");
        read(doc, "hard_kill_factor", cfg.hard_kill_factor, "config");
        if (doc.contains("order_seed")) {
            std::uint64_t s = 0;
            read(doc, "order_seed", s, "config");
            cfg.order_seed = s;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const steer::SteerError& e) {
        throw ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    cfg.validate();
    return cfg;
}

BenchmarkConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = env::read_text_file(path);
    } catch (const env::EnvError& e) {
        throw ConfigError(e.what());
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return config_from_json(doc, dir.empty() ? "." : dir);
}

json config_to_json(const BenchmarkConfig& cfg) {
    json planners_j = json::array();
    for (const PlannerEntry& p : cfg.planners) {
        planners_j.push_back({{"name", p.name}, {"label", p.label}, {"params", planner_params_to_json(p.params)}});
    }
    json smoothers_j = json::array();
    for (const SmootherEntry& s : cfg.smoothers) {
        smoothers_j.push_back({{"name", s.name}, {"params", smoother_params_to_json(s.params)}});
    }
    json steer_j = steer_config_to_json(cfg.steer_config);
    steer_j["name"] = std::string(steer::to_string(cfg.steer));
    json doc = {{"scenarios", cfg.scenarios},
                {"planners", planners_j},
                {"steer", steer_j},
                {"smoothers", smoothers_j},
                {"collision", {{"model", cfg.collision_model}, {"check_resolution", cfg.check_resolution}}},
                {"goal_tolerance", {{"position", cfg.goal_tolerance.position}, {"heading", cfg.goal_tolerance.heading}}},
                {"time_limit", cfg.time_limit},
                {"repetitions", cfg.repetitions},
                {"base_seed", cfg.base_seed},
                {"hard_kill_factor", cfg.hard_kill_factor}};
    if (cfg.order_seed) {
        doc["order_seed"] = *cfg.order_seed;
    }
    return doc;
}

std::vector<env::Scenario> resolve_scenarios(const BenchmarkConfig& cfg) {
    std::vector<env::Scenario> out;
    for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) {
        const json& spec = cfg.scenarios[i];
        std::vector<env::Scenario> part;
        try {
            if (!spec.is_object()) {
                throw ConfigError("scenario entries must be objects");
            }
            if (spec.contains("generator")) {
                part = generated(spec);
            } else if (spec.contains("file")) {
                part = from_file(spec, cfg.base_dir);
            } else if (spec.contains("scene")) {
                check_keys(spec, {"scene", "scenarios"}, "scene scenario");
                json as_file = spec;
                as_file.erase("scene");
                as_file["file"] = env::data_dir() + "/scenes/" + spec.at("scene").get<std::string>() + ".json";
                part = from_file(as_file, cfg.base_dir);
            } else if (spec.contains("movingai")) {
                part = from_movingai(spec.at("movingai"), cfg.base_dir);
            } else if (spec.contains("inline")) {
                part = from_inline(spec, i);
            } else {
                throw ConfigError("scenario entry needs one of generator, file, scene, movingai, inline");
            }
        } catch (const json::exception& e) {
            throw ConfigError("scenario " + std::to_string(i) + ": " + e.what());
        } catch (const env::EnvError& e) {
            throw ConfigError("scenario " + std::to_string(i) + ": " + e.what());
        } catch (const geom::GeometryError& e) {
            throw ConfigError("scenario " + std::to_string(i) + ": " + e.what());
        }
        for (env::Scenario& s : part) {
            out.push_back(std::move(s));
        }
    }
    std::set<std::string> names;
    for (const env::Scenario& s : out) {
        if (!names.insert(s.name).second) {
            throw ConfigError("duplicate scenario name: " + s.name);
        }
    }
    return out;
}

std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t index) { return mix64(base_seed + index); }

}  // namespace wheelbench::bench
