#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hearth/assets.hpp"
#include "hearth/error.hpp"
#include "hearth/geometry.hpp"
#include "hearth/scene.hpp"

namespace hearth {

inline constexpr double kDefaultAgentRadius = 0.25;
inline constexpr double kDefaultCellSize = 0.25;
inline constexpr double kDefaultReach = 1.5;
inline constexpr double kSnapRadius = 0.5;

class NoPath : public Error {
 public:
  using Error::Error;
};
class UnsnappableEndpoint : public Error {
 public:
  using Error::Error;
};
class Unreachable : public Error {
 public:
  using Error::Error;
};

struct Cell {
  int x = 0;
  int z = 0;
  bool operator==(const Cell&) const = default;
};

/// Walkable occupancy grid over the house bounds. Cell (x, z) covers
/// [origin.x + x*cell_size, origin.x + (x+1)*cell_size) and likewise in z.
struct NavGrid {
  Vec3 origin;
  double cell_size = kDefaultCellSize;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> walkable;
  /// Inflation radius the grid was built with.
  double agent_radius = kDefaultAgentRadius;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.z >= 0 && c.x < width && c.z < height; }
  int index(Cell c) const { return c.z * width + c.x; }
  Cell cell(int index) const { return {index % width, index / width}; }
  bool is_walkable(Cell c) const { return in_bounds(c) && walkable[static_cast<std::size_t>(index(c))] != 0; }
  bool is_walkable(int index) const { return walkable[static_cast<std::size_t>(index)] != 0; }
  Vec3 center(Cell c) const {
    return {origin.x + (c.x + 0.5) * cell_size, 0.0, origin.z + (c.z + 0.5) * cell_size};
  }
  Vec3 center(int index) const { return center(cell(index)); }
  /// Cell containing a floor point, if inside the grid.
  std::optional<Cell> cell_of(const Vec3& p) const;

  bool operator==(const NavGrid&) const = default;
};

/// Exact path cost a + b*sqrt(2) in cell units (straight steps, diagonal steps).
struct OctileCost {
  std::int64_t straight = 0;
  std::int64_t diagonal = 0;

  double value() const;
  OctileCost operator+(const OctileCost& o) const { return {straight + o.straight, diagonal + o.diagonal}; }
  bool operator==(const OctileCost&) const = default;
  std::strong_ordering operator<=>(const OctileCost& o) const;
};

struct Path {
  std::vector<int> cells;
  std::vector<Vec3> waypoints;
  double length = 0.0;  ///< meters along the waypoints
  OctileCost cost;      ///< grid cost of `cells`
};

/// Blocked obstacle rectangles (walls and floor-standing object footprints), already
/// inflated by `radius`. Objects listed in `ignore` are skipped.
std::vector<Rect> inflated_obstacles(const SceneSpec& scene, const AssetCatalog& catalog, double radius,
                                     std::span<const ObjectId> ignore = {});

NavGrid build_nav_grid(const SceneSpec& scene, const AssetCatalog& catalog, double agent_radius = kDefaultAgentRadius,
                       double cell_size = kDefaultCellSize, std::span<const ObjectId> ignore = {});

/// Marks every cell whose centre lies strictly inside `area` as blocked.
void block_area(NavGrid& grid, const Rect& area);

/// Nearest walkable cell within kSnapRadius of p (the containing cell when walkable).
std::optional<int> snap_to_walkable(const NavGrid& grid, const Vec3& p);

/// A* over 8-connected cells without corner cutting, octile heuristic; ties broken by
/// lower f, then lower h, then lower cell index.
Path find_path(const NavGrid& grid, const Vec3& start, const Vec3& goal);

/// Greedy string pulling over a connected cell route.
std::vector<Vec3> smooth_path(const NavGrid& grid, std::span<const int> cells);

/// All cells touched by the closed segment a-b (corner touches included).
std::vector<Cell> supercover(const NavGrid& grid, const Vec3& a, const Vec3& b);

bool line_of_sight(const NavGrid& grid, const Vec3& a, const Vec3& b);
/// Variant in which cells whose centres lie inside `exempt` count as walkable.
bool line_of_sight(const NavGrid& grid, const Vec3& a, const Vec3& b, const Rect& exempt);

/// Standing pose for interacting with object `id`.
Pose interaction_point(const SceneSpec& scene, const AssetCatalog& catalog, const NavGrid& grid, ObjectId id,
                       double reach = kDefaultReach);

/// 8-connected (no corner cutting) component label per cell; -1 for blocked cells.
std::vector<int> component_labels(const NavGrid& grid);

/// Blocks every cell outside the component that contains `cell`.
void retain_component(NavGrid& grid, int cell);

/// Binary PGM (P5), walkable = 255. Row 0 is the max-z edge.
std::string to_pgm(const NavGrid& grid);

}  // namespace hearth
