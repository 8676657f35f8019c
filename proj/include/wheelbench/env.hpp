#pragma once

#include "wheelbench/geom.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wheelbench::env {

using geom::ConvexPolygon;
using geom::Pose;
using geom::Vec2;

class EnvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedHeader : public EnvError {
public:
    using EnvError::EnvError;
};

class RowLengthMismatch : public EnvError {
public:
    using EnvError::EnvError;
};

class UnknownCell : public EnvError {
public:
    using EnvError::EnvError;
};

struct Bounds {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    [[nodiscard]] bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
    [[nodiscard]] double width() const { return xmax - xmin; }
    [[nodiscard]] double height() const { return ymax - ymin; }
    [[nodiscard]] double diagonal() const { return std::hypot(width(), height()); }
};

struct Cell {
    int col = 0;
    int row = 0;
};

/// Occupancy grid. Cell (col, row) covers [col, col+1] x [row, row+1] scaled by
/// cell_size, so its center is ((col + 0.5) cs, (row + 0.5) cs).
class GridEnv {
public:
    GridEnv(int width, int height, double cell_size = 1.0);
    GridEnv(int width, int height, double cell_size, std::vector<std::uint8_t> occupancy);

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] double cell_size() const { return cell_size_; }
    [[nodiscard]] const std::vector<std::uint8_t>& occupancy() const { return occupancy_; }

    [[nodiscard]] bool in_grid(int col, int row) const { return col >= 0 && row >= 0 && col < width_ && row < height_; }
    [[nodiscard]] std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    }
    /// Cells outside the grid count as occupied.
    [[nodiscard]] bool occupied(int col, int row) const { return !in_grid(col, row) || occupancy_[index(col, row)] != 0; }
    void set_occupied(int col, int row, bool value);

    [[nodiscard]] Vec2 cell_center(int col, int row) const {
        return {(col + 0.5) * cell_size_, (row + 0.5) * cell_size_};
    }
    /// Cell containing p; points on a shared edge belong to the higher cell.
    [[nodiscard]] Cell cell_of(Vec2 p) const;
    [[nodiscard]] Bounds bounds() const { return {0.0, 0.0, width_ * cell_size_, height_ * cell_size_}; }
    [[nodiscard]] std::size_t occupied_count() const;
    [[nodiscard]] std::size_t free_count() const { return occupancy_.size() - occupied_count(); }

    bool operator==(const GridEnv&) const = default;

private:
    int width_;
    int height_;
    double cell_size_;
    std::vector<std::uint8_t> occupancy_;
};

class PolygonEnv {
public:
    /// Throws EnvError if an obstacle leaves the bounds.
    PolygonEnv(Bounds bounds, std::vector<ConvexPolygon> obstacles);

    [[nodiscard]] const Bounds& bounds() const { return bounds_; }
    [[nodiscard]] const std::vector<ConvexPolygon>& obstacles() const { return obstacles_; }

private:
    Bounds bounds_;
    std::vector<ConvexPolygon> obstacles_;
};

using Environment = std::variant<GridEnv, PolygonEnv>;

Bounds bounds_of(const Environment& env);

struct Scenario {
    std::string name;
    std::shared_ptr<const Environment> env;
    Pose start;
    Pose goal;
    std::optional<double> optimal_2d_length;
};

// MovingAI benchmark files

GridEnv parse_movingai_map(std::string_view text, double cell_size = 1.0);
std::string serialize_movingai_map(const GridEnv& grid);

/// One scenario per data row; headings are 0 and names are "<map>#<row>".
std::vector<Scenario> parse_movingai_scen(std::string_view text, std::shared_ptr<const Environment> env);

/// The n scenarios with the largest optimal length, in their original order.
/// Ties are broken by file order (later rows win, matching "select the last n").
std::vector<Scenario> select_hardest(const std::vector<Scenario>& scens, std::size_t n);

// Generators

struct CorridorParams {
    int width = 100;
    int height = 100;
    int corridor_radius = 4;
    int iterations = 40;
};

struct GeneratedGrid {
    GridEnv grid;
    Pose start;
    Pose goal;
};

/// Corridor maze grown from a fully occupied grid by a nearest-node tree
/// exploration with axis-aligned legs. Start and goal are the two tree nodes
/// farthest apart along the tree.
GeneratedGrid gen_corridor_env(std::uint64_t seed, const CorridorParams& params);

struct KeepClear {
    Vec2 center;
    double radius = 0.0;
};

/// Exactly round(density * width * height) occupied cells, drawn without
/// replacement. Cells whose center lies within a keep-clear disc are never drawn.
GridEnv gen_density_env(std::uint64_t seed, int width, int height, double density,
                        const std::vector<KeepClear>& keep_clear = {});

/// Density grid with a fixed corner-to-corner query kept clear of obstacles.
GeneratedGrid gen_density_scenario(std::uint64_t seed, int width, int height, double density);

// JSON documents

struct PolygonScene {
    std::shared_ptr<const Environment> env;
    std::vector<Scenario> scenarios;
};

/// Clockwise obstacles are reversed unless `strict`, in which case they are rejected.
PolygonScene load_polygon_env(std::string_view text, bool strict = false, std::string_view scene_name = "scene");
std::string write_polygon_env(const PolygonEnv& env, const std::vector<Scenario>& scenarios);

nlohmann::json grid_to_json(const GridEnv& grid, const Pose& start, const Pose& goal, std::uint64_t seed,
                            const nlohmann::json& params);
GeneratedGrid grid_from_json(const nlohmann::json& doc);

/// Loads a polygon scene (.json with "bounds"), a generated grid (.json with
/// "width") or a MovingAI map (.map). Grid files yield one scenario.
PolygonScene load_environment_file(const std::string& path);

std::string read_text_file(const std::string& path);

/// Directory of the bundled data files (scenes).
std::string data_dir();

}  // namespace wheelbench::env
