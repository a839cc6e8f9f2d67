#include "hearth/nav.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <fmt/format.h>

namespace hearth {

namespace {

constexpr double kEps = 1e-9;

struct Step {
  int dx, dz;
  bool diagonal;
};

constexpr Step kSteps[8] = {{1, 0, false},  {-1, 0, false}, {0, 1, false},  {0, -1, false},
                            {1, 1, true},   {1, -1, true},  {-1, 1, true},  {-1, -1, true}};

bool can_step(const NavGrid& g, Cell from, const Step& s) {
  Cell to{from.x + s.dx, from.z + s.dz};
  if (!g.is_walkable(to)) return false;
  if (s.diagonal) return g.is_walkable(Cell{from.x + s.dx, from.z}) && g.is_walkable(Cell{from.x, from.z + s.dz});
  return true;
}

OctileCost octile(Cell a, Cell b) {
  std::int64_t dx = std::abs(a.x - b.x), dz = std::abs(a.z - b.z);
  return {std::max(dx, dz) - std::min(dx, dz), std::min(dx, dz)};
}

}  // namespace

// ---------------------------------------------------------------- OctileCost

double OctileCost::value() const { return static_cast<double>(straight) + static_cast<double>(diagonal) * std::numbers::sqrt2; }

std::strong_ordering OctileCost::operator<=>(const OctileCost& o) const {
  // sign of (straight - o.straight) + (diagonal - o.diagonal) * sqrt(2), computed exactly.
  const std::int64_t a = straight - o.straight;
  const std::int64_t b = diagonal - o.diagonal;
  if (a == 0 && b == 0) return std::strong_ordering::equal;
  if (a >= 0 && b >= 0) return std::strong_ordering::greater;
  if (a <= 0 && b <= 0) return std::strong_ordering::less;
  // opposite signs: compare a^2 with 2 b^2 (never equal since sqrt(2) is irrational)
  const bool a_dominates = a * a > 2 * b * b;
  if (a > 0) return a_dominates ? std::strong_ordering::greater : std::strong_ordering::less;
  return a_dominates ? std::strong_ordering::less : std::strong_ordering::greater;
}

// ---------------------------------------------------------------- grid

std::optional<Cell> NavGrid::cell_of(const Vec3& p) const {
  const double u = (p.x - origin.x) / cell_size, v = (p.z - origin.z) / cell_size;
  if (!(u >= 0 && v >= 0)) return std::nullopt;
  Cell c{static_cast<int>(std::floor(u)), static_cast<int>(std::floor(v))};
  if (!in_bounds(c)) return std::nullopt;
  return c;
}

std::vector<Rect> inflated_obstacles(const SceneSpec& scene, const AssetCatalog& catalog, double radius,
                                     std::span<const ObjectId> ignore) {
  std::vector<Rect> out;
  for (const auto& w : wall_pieces(scene)) out.push_back(w.inflated(radius));
  for (const auto& o : scene.objects) {
    if (o.parent_receptacle) continue;
    if (std::find(ignore.begin(), ignore.end(), o.id) != ignore.end()) continue;
    const auto* asset = catalog.find(o.asset);
    if (!asset) continue;
    out.push_back(world_aabb(o, *asset).footprint().inflated(radius));
  }
  return out;
}

NavGrid build_nav_grid(const SceneSpec& scene, const AssetCatalog& catalog, double agent_radius, double cell_size,
                       std::span<const ObjectId> ignore) {
  if (!(cell_size > 0)) throw Error("cell_size must be positive");
  NavGrid g;
  g.cell_size = cell_size;
  g.agent_radius = agent_radius;
  const Rect hb = house_bounds(scene);
  g.origin = {hb.min_x, 0.0, hb.min_z};
  g.width = std::max(0, static_cast<int>(std::ceil(hb.width() / cell_size - kEps)));
  g.height = std::max(0, static_cast<int>(std::ceil(hb.depth() / cell_size - kEps)));
  g.walkable.assign(static_cast<std::size_t>(g.width) * g.height, 0);

  const auto obstacles = inflated_obstacles(scene, catalog, agent_radius, ignore);
  for (int z = 0; z < g.height; ++z) {
    for (int x = 0; x < g.width; ++x) {
      const Vec3 c = g.center(Cell{x, z});
      bool on_floor = std::any_of(scene.rooms.begin(), scene.rooms.end(),
                                  [&](const Room& r) { return r.bounds.contains(c.x, c.z); });
      if (!on_floor) continue;
      bool blocked = std::any_of(obstacles.begin(), obstacles.end(),
                                 [&](const Rect& r) { return r.strictly_contains(c.x, c.z); });
      if (!blocked) g.walkable[static_cast<std::size_t>(g.index(Cell{x, z}))] = 1;
    }
  }
  return g;
}

void block_area(NavGrid& grid, const Rect& area) {
  for (int i = 0; i < grid.width * grid.height; ++i) {
    const Vec3 c = grid.center(i);
    if (area.strictly_contains(c.x, c.z)) grid.walkable[static_cast<std::size_t>(i)] = 0;
  }
}

std::optional<int> snap_to_walkable(const NavGrid& grid, const Vec3& p) {
  if (auto c = grid.cell_of(p); c && grid.is_walkable(*c)) return grid.index(*c);
  const int span = static_cast<int>(std::ceil(kSnapRadius / grid.cell_size)) + 1;
  const int cx = static_cast<int>(std::floor((p.x - grid.origin.x) / grid.cell_size));
  const int cz = static_cast<int>(std::floor((p.z - grid.origin.z) / grid.cell_size));
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int z = cz - span; z <= cz + span; ++z) {
    for (int x = cx - span; x <= cx + span; ++x) {
      Cell c{x, z};
      if (!grid.is_walkable(c)) continue;
      double d = planar_distance(grid.center(c), p);
      if (d > kSnapRadius + kEps) continue;
      int idx = grid.index(c);
      if (d < best_d - kEps || (std::fabs(d - best_d) <= kEps && idx < *best)) {
        best_d = d;
        best = idx;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------- A*

Path find_path(const NavGrid& grid, const Vec3& start, const Vec3& goal) {
  const auto s = snap_to_walkable(grid, start);
  if (!s) throw UnsnappableEndpoint(fmt::format("start ({:.3f}, {:.3f}) is not near walkable floor", start.x, start.z));
  const auto t = snap_to_walkable(grid, goal);
  if (!t) throw UnsnappableEndpoint(fmt::format("goal ({:.3f}, {:.3f}) is not near walkable floor", goal.x, goal.z));

  const int n = grid.width * grid.height;
  const Cell goal_cell = grid.cell(*t);

  struct Entry {
    OctileCost f, h;
    int index;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (auto c = a.f <=> b.f; c != 0) return c > 0;
    if (auto c = a.h <=> b.h; c != 0) return c > 0;
    return a.index > b.index;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  std::vector<OctileCost> g(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0), closed(static_cast<std::size_t>(n), 0);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);

  seen[*s] = 1;
  const OctileCost h0 = octile(grid.cell(*s), goal_cell);
  open.push({h0, h0, *s});
  bool found = false;
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = 1;
    if (top.index == *t) {
      found = true;
      break;
    }
    const Cell cur = grid.cell(top.index);
    for (const auto& st : kSteps) {
      if (!can_step(grid, cur, st)) continue;
      const Cell nb{cur.x + st.dx, cur.z + st.dz};
      const int ni = grid.index(nb);
      if (closed[ni]) continue;
      const OctileCost cand = g[top.index] + (st.diagonal ? OctileCost{0, 1} : OctileCost{1, 0});
      if (seen[ni] && !(cand < g[ni])) continue;
      seen[ni] = 1;
      g[ni] = cand;
      parent[ni] = top.index;
      const OctileCost h = octile(nb, goal_cell);
      open.push({cand + h, h, ni});
    }
  }
  if (!found) throw NoPath(fmt::format("no path from ({:.3f}, {:.3f}) to ({:.3f}, {:.3f})", start.x, start.z, goal.x, goal.z));

  Path path;
  for (int c = *t; c != -1; c = parent[c]) path.cells.push_back(c);
  std::reverse(path.cells.begin(), path.cells.end());
  path.cost = g[*t];
  path.waypoints = smooth_path(grid, path.cells);
  for (std::size_t i = 1; i < path.waypoints.size(); ++i)
    path.length += planar_distance(path.waypoints[i - 1], path.waypoints[i]);
  return path;
}

// ---------------------------------------------------------------- smoothing and sight

std::vector<Vec3> smooth_path(const NavGrid& grid, std::span<const int> cells) {
  std::vector<Vec3> out;
  if (cells.empty()) return out;
  std::size_t anchor = 0;
  out.push_back(grid.center(cells[0]));
  while (anchor + 1 < cells.size()) {
    std::size_t next = anchor + 1;
    for (std::size_t j = cells.size() - 1; j > anchor + 1; --j) {
      if (line_of_sight(grid, grid.center(cells[anchor]), grid.center(cells[j]))) {
        next = j;
        break;
      }
    }
    out.push_back(grid.center(cells[next]));
    anchor = next;
  }
  return out;
}

std::vector<Cell> supercover(const NavGrid& grid, const Vec3& a, const Vec3& b) {
  double u0 = (a.x - grid.origin.x) / grid.cell_size, v0 = (a.z - grid.origin.z) / grid.cell_size;
  double u1 = (b.x - grid.origin.x) / grid.cell_size, v1 = (b.z - grid.origin.z) / grid.cell_size;
  // Order the endpoints canonically so (a, b) and (b, a) enumerate identical cells.
  if (u1 < u0 || (u1 == u0 && v1 < v0)) {
    std::swap(u0, u1);
    std::swap(v0, v1);
  }
  std::vector<Cell> out;
  auto add_column = [&](int col, double va, double vb) {
    const double lo = std::min(va, vb), hi = std::max(va, vb);
    for (int row = static_cast<int>(std::floor(lo - kEps)); row <= static_cast<int>(std::floor(hi + kEps)); ++row)
      out.push_back({col, row});
  };
  const int c0 = static_cast<int>(std::floor(u0 - kEps)), c1 = static_cast<int>(std::floor(u1 + kEps));
  if (u1 - u0 < kEps) {
    for (int col = c0; col <= c1; ++col) add_column(col, v0, v1);
    return out;
  }
  const double slope = (v1 - v0) / (u1 - u0);
  for (int col = c0; col <= c1; ++col) {
    const double lo = std::max(u0, static_cast<double>(col) - kEps);
    const double hi = std::min(u1, static_cast<double>(col + 1) + kEps);
    if (lo > hi) continue;
    add_column(col, v0 + slope * (lo - u0), v0 + slope * (hi - u0));
  }
  return out;
}

namespace {

template <typename Exempt>
bool sight(const NavGrid& grid, const Vec3& a, const Vec3& b, Exempt&& exempt) {
  for (const Cell& c : supercover(grid, a, b)) {
    if (!grid.in_bounds(c)) return false;
    if (grid.is_walkable(c)) continue;
    if (exempt(c)) continue;
    return false;
  }
  return true;
}

}  // namespace

bool line_of_sight(const NavGrid& grid, const Vec3& a, const Vec3& b) {
  return sight(grid, a, b, [](Cell) { return false; });
}

bool line_of_sight(const NavGrid& grid, const Vec3& a, const Vec3& b, const Rect& exempt) {
  return sight(grid, a, b, [&](Cell c) {
    const Vec3 m = grid.center(c);
    return exempt.contains(m.x, m.z);
  });
}

// ---------------------------------------------------------------- interaction points

Pose interaction_point(const SceneSpec& scene, const AssetCatalog& catalog, const NavGrid& grid, ObjectId id,
                       double reach) {
  const auto* obj = scene.find_object(id);
  if (!obj) throw Error("unknown object id " + std::to_string(id));
  const AABB box = world_aabb(*obj, catalog.at(obj->asset));
  const Rect fp = box.footprint();
  const ObjectId root = root_of(scene, id);
  const Rect blocker = world_aabb(scene, catalog, root).footprint().inflated(grid.agent_radius + kEps);
  const Vec3 target{box.center().x, 0.0, box.center().z};

  std::vector<std::pair<double, int>> candidates;
  for (int i = 0; i < grid.width * grid.height; ++i) {
    if (!grid.is_walkable(i)) continue;
    const Vec3 c = grid.center(i);
    const double d = fp.distance_to(c.x, c.z);
    if (d <= reach + kEps) candidates.emplace_back(d, i);
  }
  std::sort(candidates.begin(), candidates.end());
  for (const auto& [d, i] : candidates) {
    const Vec3 c = grid.center(i);
    if (!line_of_sight(grid, c, target, blocker)) continue;
    return Pose{c, heading_of(target.x - c.x, target.z - c.z)};
  }
  throw Unreachable("object " + std::to_string(id) + " has no reachable standing point");
}

// ---------------------------------------------------------------- components

std::vector<int> component_labels(const NavGrid& grid) {
  const int n = grid.width * grid.height;
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (!grid.is_walkable(i) || label[i] != -1) continue;
    label[i] = next;
    stack.push_back(i);
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      const Cell c = grid.cell(cur);
      for (const auto& st : kSteps) {
        if (!can_step(grid, c, st)) continue;
        const int ni = grid.index(Cell{c.x + st.dx, c.z + st.dz});
        if (label[ni] != -1) continue;
        label[ni] = next;
        stack.push_back(ni);
      }
    }
    ++next;
  }
  return label;
}

void retain_component(NavGrid& grid, int cell) {
  const auto labels = component_labels(grid);
  const int keep = labels[static_cast<std::size_t>(cell)];
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != keep) grid.walkable[i] = 0;
}

std::string to_pgm(const NavGrid& grid) {
  std::string out = fmt::format("P5\n{} {}\n255\n", grid.width, grid.height);
  for (int z = grid.height - 1; z >= 0; --z)
    for (int x = 0; x < grid.width; ++x) out.push_back(grid.is_walkable(Cell{x, z}) ? static_cast<char>(255) : 0);
  return out;
}

}  // namespace hearth
