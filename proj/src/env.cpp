#include "wheelbench/env.hpp"

#include "wheelbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace wheelbench::env {

using nlohmann::json;

namespace {

constexpr std::uint64_t kCorridorStream = 0xc0441d0aULL;
constexpr std::uint64_t kDensityStream = 0xde45171eULL;

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        pos = end + 1;
    }
    while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string_view::npos) {
        lines.pop_back();
    }
    return lines;
}

Pose pose_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) {
        throw EnvError(std::string(what) + " must be [x, y, theta]");
    }
    try {
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    } catch (const geom::GeometryError& e) {
        throw EnvError(std::string(what) + ": " + e.what());
    }
}

json pose_to_json(const Pose& p) { return json::array({p.x(), p.y(), p.theta()}); }

}  // namespace

GridEnv::GridEnv(int width, int height, double cell_size)
    : GridEnv(width, height, cell_size,
              std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)))) {}

GridEnv::GridEnv(int width, int height, double cell_size, std::vector<std::uint8_t> occupancy)
    : width_(width), height_(height), cell_size_(cell_size), occupancy_(std::move(occupancy)) {
    if (width < 1 || height < 1) {
        throw EnvError("grid dimensions must be at least 1x1");
    }
    if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
        throw EnvError("cell_size must be positive");
    }
    if (occupancy_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw EnvError("occupancy bitmap size does not match width x height");
    }
    for (auto& c : occupancy_) {
        c = c != 0 ? 1 : 0;
    }
}

void GridEnv::set_occupied(int col, int row, bool value) {
    if (!in_grid(col, row)) {
        throw EnvError("cell outside grid");
    }
    occupancy_[index(col, row)] = value ? 1 : 0;
}

Cell GridEnv::cell_of(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_size_)), static_cast<int>(std::floor(p.y / cell_size_))};
}

std::size_t GridEnv::occupied_count() const {
    return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), std::uint8_t{1}));
}

PolygonEnv::PolygonEnv(Bounds bounds, std::vector<ConvexPolygon> obstacles)
    : bounds_(bounds), obstacles_(std::move(obstacles)) {
    if (!(bounds_.xmax > bounds_.xmin) || !(bounds_.ymax > bounds_.ymin)) {
        throw EnvError("bounds must have positive extent");
    }
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
        for (const Vec2& v : obstacles_[i].vertices()) {
            if (!bounds_.contains(v)) {
                throw EnvError("obstacle " + std::to_string(i) + " leaves the bounds");
            }
        }
    }
}

Bounds bounds_of(const Environment& env) {
    return std::visit([](const auto& e) { return e.bounds(); }, env);
}

GridEnv parse_movingai_map(std::string_view text, double cell_size) {
    const auto lines = split_lines(text);
    int height = -1;
    int width = -1;
    std::size_t i = 0;
    bool saw_map = false;
    for (; i < lines.size(); ++i) {
        std::istringstream in{std::string(lines[i])};
        std::string key;
        in >> key;
        if (key == "map") {
            saw_map = true;
            ++i;
            break;
        }
        if (key == "height" || key == "width") {
            int value = 0;
            if (!(in >> value) || value < 1) {
                throw MalformedHeader("map header: bad " + key + " value");
            }
            (key == "height" ? height : width) = value;
        } else if (key != "type" && !key.empty()) {
            throw MalformedHeader("map header: unexpected line '" + std::string(lines[i]) + "'");
        }
    }
    if (!saw_map || height < 1 || width < 1) {
        throw MalformedHeader("map header must declare height, width and 'map'");
    }
    const std::size_t body = lines.size() - i;
    if (body != static_cast<std::size_t>(height)) {
        throw RowLengthMismatch("map declares " + std::to_string(height) + " rows but has " + std::to_string(body));
    }
    GridEnv grid(width, height, cell_size);
    for (int row = 0; row < height; ++row) {
        const std::string_view line = lines[i + static_cast<std::size_t>(row)];
        if (line.size() != static_cast<std::size_t>(width)) {
            throw RowLengthMismatch("map row " + std::to_string(row) + " has " + std::to_string(line.size()) +
                                    " cells, expected " + std::to_string(width));
        }
        for (int col = 0; col < width; ++col) {
            switch (line[static_cast<std::size_t>(col)]) {
                case '@':
                case 'O':
                case 'T': grid.set_occupied(col, row, true); break;
                case '.':
                case 'G':
                case 'S':
                case 'W': break;
                default:
                    throw UnknownCell("map row " + std::to_string(row) + ": unknown cell '" +
                                      std::string(1, line[static_cast<std::size_t>(col)]) + "'");
            }
        }
    }
    return grid;
}

std::string serialize_movingai_map(const GridEnv& grid) {
    std::string out = "type octile\nheight " + std::to_string(grid.height()) + "\nwidth " +
                      std::to_string(grid.width()) + "\nmap\n";
    for (int row = 0; row < grid.height(); ++row) {
        for (int col = 0; col < grid.width(); ++col) {
            out += grid.occupied(col, row) ? '@' : '.';
        }
        out += '\n';
    }
    return out;
}

std::vector<Scenario> parse_movingai_scen(std::string_view text, std::shared_ptr<const Environment> env) {
    const auto lines = split_lines(text);
    std::vector<Scenario> out;
    if (lines.empty()) {
        return out;
    }
    if (lines[0].rfind("version", 0) != 0) {
        throw EnvError("scen line 1: expected a version line");
    }
    const GridEnv* grid = env ? std::get_if<GridEnv>(env.get()) : nullptr;
    const double cs = grid ? grid->cell_size() : 1.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t") == std::string_view::npos) {
            continue;
        }
        std::istringstream in{std::string(lines[i])};
        int bucket = 0;
        std::string map;
        int mw = 0;
        int mh = 0;
        int sx = 0;
        int sy = 0;
        int gx = 0;
        int gy = 0;
        double optimal = 0.0;
        if (!(in >> bucket >> map >> mw >> mh >> sx >> sy >> gx >> gy >> optimal)) {
            throw EnvError("scen line " + std::to_string(i + 1) + ": malformed row");
        }
        if (grid && (!grid->in_grid(sx, sy) || !grid->in_grid(gx, gy))) {
            throw EnvError("scen line " + std::to_string(i + 1) + ": start or goal outside the map");
        }
        Scenario s;
        s.name = map + "#" + std::to_string(out.size());
        s.env = env;
        s.start = Pose((sx + 0.5) * cs, (sy + 0.5) * cs, 0.0);
        s.goal = Pose((gx + 0.5) * cs, (gy + 0.5) * cs, 0.0);
        s.optimal_2d_length = optimal;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Scenario> select_hardest(const std::vector<Scenario>& scens, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("select_hardest: n must be at least 1");
    }
    if (scens.size() <= n) {
        return scens;
    }
    std::vector<std::size_t> order(scens.size());
    std::iota(order.begin(), order.end(), 0);
    auto len = [&](std::size_t i) { return scens[i].optimal_2d_length.value_or(0.0); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return len(a) > len(b) || (len(a) == len(b) && a > b);
    });
    order.resize(n);
    std::sort(order.begin(), order.end());
    std::vector<Scenario> out;
    out.reserve(n);
    for (std::size_t i : order) {
        out.push_back(scens[i]);
    }
    return out;
}

GeneratedGrid gen_corridor_env(std::uint64_t seed, const CorridorParams& p) {
    const int r = p.corridor_radius;
    if (r < 1 || p.iterations < 1) {
        throw std::invalid_argument("gen_corridor_env: corridor_radius and iterations must be at least 1");
    }
    if (p.width < 2 * r + 1 || p.height < 2 * r + 1) {
        throw std::invalid_argument("gen_corridor_env: grid too small for the corridor radius");
    }
    GridEnv grid(p.width, p.height, 1.0,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(p.width) * static_cast<std::size_t>(p.height), 1));
    Rng rng(seed, kCorridorStream);
    // samples stay r cells away from the border so carving leaves a solid rim
    auto sample = [&]() {
        const int col = r + static_cast<int>(rng.below(static_cast<std::uint64_t>(p.width - 2 * r)));
        const int row = r + static_cast<int>(rng.below(static_cast<std::uint64_t>(p.height - 2 * r)));
        return Cell{col, row};
    };
    auto carve = [&](int c0, int r0, int c1, int r1) {
        for (int row = std::min(r0, r1) - (r - 1); row <= std::max(r0, r1) + (r - 1); ++row) {
            for (int col = std::min(c0, c1) - (r - 1); col <= std::max(c0, c1) + (r - 1); ++col) {
                grid.set_occupied(col, row, false);
            }
        }
    };

    std::vector<Cell> nodes{sample()};
    std::vector<std::vector<std::pair<int, int>>> adj(1);  // (neighbor, leg length)
    carve(nodes[0].col, nodes[0].row, nodes[0].col, nodes[0].row);
    for (int it = 0; it < p.iterations; ++it) {
        const Cell s = sample();
        const bool horizontal = rng.bernoulli(0.5);
        std::size_t nearest = 0;
        long best = -1;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const long dc = nodes[i].col - s.col;
            const long dr = nodes[i].row - s.row;
            const long d = dc * dc + dr * dr;
            if (best < 0 || d < best) {
                best = d;
                nearest = i;
            }
        }
        const Cell n = nodes[nearest];
        const Cell target = horizontal ? Cell{s.col, n.row} : Cell{n.col, s.row};
        const int leg = std::abs(target.col - n.col) + std::abs(target.row - n.row);
        if (leg == 0) {
            continue;
        }
        carve(n.col, n.row, target.col, target.row);
        nodes.push_back(target);
        adj.emplace_back();
        const int id = static_cast<int>(nodes.size()) - 1;
        adj[nearest].emplace_back(id, leg);
        adj[static_cast<std::size_t>(id)].emplace_back(static_cast<int>(nearest), leg);
    }

    // tree diameter by two farthest-node sweeps
    auto sweep = [&](int root, std::vector<int>& parent) {
        std::vector<long> dist(nodes.size(), -1);
        parent.assign(nodes.size(), -1);
        std::vector<int> stack{root};
        dist[static_cast<std::size_t>(root)] = 0;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + w;
                    parent[static_cast<std::size_t>(v)] = u;
                    stack.push_back(v);
                }
            }
        }
        return static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    };
    std::vector<int> parent;
    const int a = sweep(0, parent);
    const int b = sweep(a, parent);
    // path from b back to a; b is the start, a the goal
    std::vector<int> path{b};
    while (path.back() != a) {
        path.push_back(parent[static_cast<std::size_t>(path.back())]);
    }
    auto heading = [&](int from, int to) {
        const Cell f = nodes[static_cast<std::size_t>(from)];
        const Cell t = nodes[static_cast<std::size_t>(to)];
        return std::atan2(static_cast<double>(t.row - f.row), static_cast<double>(t.col - f.col));
    };
    const Cell sc = nodes[static_cast<std::size_t>(b)];
    const Cell gc = nodes[static_cast<std::size_t>(a)];
    const double start_heading = path.size() > 1 ? heading(path[0], path[1]) : 0.0;
    const double goal_heading = path.size() > 1 ? heading(path[path.size() - 2], path.back()) : 0.0;
    const Vec2 sp = grid.cell_center(sc.col, sc.row);
    const Vec2 gp = grid.cell_center(gc.col, gc.row);
    return {std::move(grid), Pose(sp, start_heading), Pose(gp, goal_heading)};
}

GridEnv gen_density_env(std::uint64_t seed, int width, int height, double density,
                        const std::vector<KeepClear>& keep_clear) {
    if (!(density >= 0.0 && density < 1.0)) {
        throw std::invalid_argument("gen_density_env: density must be in [0, 1)");
    }
    GridEnv grid(width, height, 1.0);
    const std::size_t total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const auto count = static_cast<std::size_t>(std::llround(density * static_cast<double>(total)));
    std::vector<std::size_t> candidates;
    candidates.reserve(total);
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const Vec2 c = grid.cell_center(col, row);
            const bool kept = std::any_of(keep_clear.begin(), keep_clear.end(), [&](const KeepClear& k) {
                return geom::distance(c, k.center) <= k.radius;
            });
            if (!kept) {
                candidates.push_back(grid.index(col, row));
            }
        }
    }
    if (count > candidates.size()) {
        throw std::invalid_argument("gen_density_env: not enough free cells for the requested density");
    }
    Rng rng(seed, kDensityStream);
    std::vector<std::uint8_t> occ(total, 0);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
        std::swap(candidates[i], candidates[j]);
        occ[candidates[i]] = 1;
    }
    return GridEnv(width, height, 1.0, std::move(occ));
}

GeneratedGrid gen_density_scenario(std::uint64_t seed, int width, int height, double density) {
    const double margin = 3.5;
    const Pose start(margin, margin, geom::kPi / 4);
    const Pose goal(width - margin, height - margin, geom::kPi / 4);
    std::vector<KeepClear> keep{{start.position(), 3.0}, {goal.position(), 3.0}};
    return {gen_density_env(seed, width, height, density, keep), start, goal};
}

PolygonScene load_polygon_env(std::string_view text, bool strict, std::string_view scene_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw EnvError(std::string("polygon env: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("bounds") || !doc["bounds"].is_array() || doc["bounds"].size() != 4) {
        throw EnvError("polygon env: 'bounds' must be [xmin, ymin, xmax, ymax]");
    }
    try {
        const auto& b = doc["bounds"];
        const Bounds bounds{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        std::vector<ConvexPolygon> obstacles;
        const json empty = json::array();
        const json& obs = doc.contains("obstacles") ? doc["obstacles"] : empty;
        if (!obs.is_array()) {
            throw EnvError("polygon env: 'obstacles' must be an array");
        }
        for (std::size_t i = 0; i < obs.size(); ++i) {
            std::vector<Vec2> ring;
            for (const auto& v : obs[i]) {
                if (!v.is_array() || v.size() != 2) {
                    throw EnvError("polygon env: obstacle " + std::to_string(i) + " has a malformed vertex");
                }
                ring.push_back({v[0].get<double>(), v[1].get<double>()});
            }
            try {
                if (strict && ring.size() >= 3 && geom::signed_area(ring) < 0.0) {
                    throw EnvError("polygon env: obstacle " + std::to_string(i) + " is clockwise");
                }
                obstacles.push_back(ConvexPolygon::from_any_orientation(std::move(ring)));
            } catch (const geom::GeometryError& e) {
                throw EnvError("polygon env: obstacle " + std::to_string(i) + ": " + e.what());
            }
        }
        PolygonScene scene;
        scene.env = std::make_shared<const Environment>(PolygonEnv(bounds, std::move(obstacles)));
        if (doc.contains("scenarios")) {
            for (const auto& s : doc["scenarios"]) {
                Scenario sc;
                sc.name = s.contains("name") ? s["name"].get<std::string>()
                                             : std::string(scene_name) + "#" + std::to_string(scene.scenarios.size());
                sc.env = scene.env;
                sc.start = pose_from_json(s.at("start"), "start");
                sc.goal = pose_from_json(s.at("goal"), "goal");
                scene.scenarios.push_back(std::move(sc));
            }
        }
        return scene;
    } catch (const json::exception& e) {
        throw EnvError(std::string("polygon env: schema violation: ") + e.what());
    }
}

std::string write_polygon_env(const PolygonEnv& env, const std::vector<Scenario>& scenarios) {
    json doc;
    const Bounds& b = env.bounds();
    doc["bounds"] = {b.xmin, b.ymin, b.xmax, b.ymax};
    doc["obstacles"] = json::array();
    for (const auto& poly : env.obstacles()) {
        json ring = json::array();
        for (const Vec2& v : poly.vertices()) {
            ring.push_back({v.x, v.y});
        }
        doc["obstacles"].push_back(ring);
    }
    doc["scenarios"] = json::array();
    for (const auto& s : scenarios) {
        doc["scenarios"].push_back({{"name", s.name}, {"start", pose_to_json(s.start)}, {"goal", pose_to_json(s.goal)}});
    }
    return doc.dump(2);
}

json grid_to_json(const GridEnv& grid, const Pose& start, const Pose& goal, std::uint64_t seed, const json& params) {
    json occupied = json::array();
    for (std::size_t i = 0; i < grid.occupancy().size(); ++i) {
        if (grid.occupancy()[i] != 0) {
            occupied.push_back(i);
        }
    }
    return {{"width", grid.width()},         {"height", grid.height()},      {"cell_size", grid.cell_size()},
            {"occupied", std::move(occupied)}, {"start", pose_to_json(start)}, {"goal", pose_to_json(goal)},
            {"seed", seed},                  {"params", params}};
}

GeneratedGrid grid_from_json(const json& doc) {
    try {
        const int w = doc.at("width").get<int>();
        const int h = doc.at("height").get<int>();
        const double cs = doc.value("cell_size", 1.0);
        GridEnv grid(w, h, cs);
        for (const auto& idx : doc.at("occupied")) {
            const auto i = idx.get<std::size_t>();
            if (i >= grid.occupancy().size()) {
                throw EnvError("grid env: occupied index out of range");
            }
            grid.set_occupied(static_cast<int>(i % static_cast<std::size_t>(w)),
                              static_cast<int>(i / static_cast<std::size_t>(w)), true);
        }
        return {std::move(grid), pose_from_json(doc.at("start"), "start"), pose_from_json(doc.at("goal"), "goal")};
    } catch (const json::exception& e) {
        throw EnvError(std::string("grid env: schema violation: ") + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw EnvError("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PolygonScene load_environment_file(const std::string& path) {
    const std::string text = read_text_file(path);
    const std::string stem = std::filesystem::path(path).stem().string();
    if (std::filesystem::path(path).extension() == ".map") {
        return {std::make_shared<const Environment>(parse_movingai_map(text)), {}};
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw EnvError(path + ": invalid JSON: " + e.what());
    }
    if (doc.contains("bounds")) {
        return load_polygon_env(text, false, stem);
    }
    GeneratedGrid g = grid_from_json(doc);
    PolygonScene scene;
    scene.env = std::make_shared<const Environment>(std::move(g.grid));
    scene.scenarios.push_back({stem, scene.env, g.start, g.goal, std::nullopt});
    return scene;
}

std::string data_dir() {
    if (const char* dir = std::getenv("WHEELBENCH_DATA")) {
        return dir;
    }
    return WHEELBENCH_DATA_DIR;
}

}  // namespace wheelbench::env
