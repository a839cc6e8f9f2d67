#include <gtest/gtest.h>

#include <set>

#include <hearth/nav.hpp>
#include <hearth/planner.hpp>

#include "support.hpp"

using namespace hearth;
using namespace hearth::test;

namespace {

const AssetCatalog& cat() { return *AssetCatalog::builtin(); }

int pick_open(Rng& rng, const NavGrid& g) {
  for (;;) {
    const int i = static_cast<int>(rng.index(g.walkable.size()));
    if (g.walkable[i]) return i;
  }
}

OctileCost recount(const NavGrid& g, const std::vector<int>& cells) {
  OctileCost c;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const Cell a = g.cell(cells[i - 1]), b = g.cell(cells[i]);
    const int dx = std::abs(a.x - b.x), dz = std::abs(a.z - b.z);
    EXPECT_LE(std::max(dx, dz), 1);
    if (dx && dz)
      ++c.diagonal;
    else
      ++c.straight;
  }
  return c;
}

}  // namespace

TEST(Nav, OctileOrdering) {
  EXPECT_LT((OctileCost{3, 0}), (OctileCost{0, 3}));
  EXPECT_GT((OctileCost{2, 0}), (OctileCost{0, 1}));
  EXPECT_LT((OctileCost{1, 0}), (OctileCost{0, 1}));
  EXPECT_EQ(compare_octile(0, 5, 7, 0), 1);
  EXPECT_EQ(compare_octile(0, 5, 8, 0), -1);
}

TEST(Nav, OpenRoomGridIsOneComponent) {
  const SceneSpec s = open_room();
  const NavGrid g = build_nav_grid(s, cat());
  EXPECT_EQ(static_cast<std::size_t>(g.width * g.height), g.walkable.size());
  const auto labels = component_labels(g);
  std::set<int> comps(labels.begin(), labels.end());
  comps.erase(-1);
  EXPECT_EQ(comps.size(), 1u);
}

TEST(Nav, DoorIsTheOnlyConnection) {
  const SceneSpec s = two_rooms();
  const NavGrid g = build_nav_grid(s, cat());
  const auto labels = component_labels(g);
  const auto left = g.cell_of({1.0, 0, 1.0}), right = g.cell_of({7.0, 0, 3.0});
  ASSERT_TRUE(left && right);
  EXPECT_EQ(labels[g.index(*left)], labels[g.index(*right)]);
  std::set<int> comps(labels.begin(), labels.end());
  comps.erase(-1);
  EXPECT_EQ(comps.size(), 1u);

  // Sealing the door splits the house in two.
  SceneSpec sealed = s;
  sealed.doors.clear();
  const NavGrid g2 = build_nav_grid(sealed, cat());
  const auto l2 = component_labels(g2);
  EXPECT_NE(l2[g2.index(*left)], l2[g2.index(*right)]);

  // Every cell that crosses the shared wall lies in the door span.
  for (int z = 0; z < g.height; ++z)
    for (int x = 0; x < g.width; ++x) {
      const Vec3 c = g.center(Cell{x, z});
      if (std::abs(c.x - 4.0) < 0.1 && g.is_walkable(Cell{x, z})) EXPECT_LT(std::abs(c.z - 2.0), 0.6);
    }
}

TEST(Nav, AStarMatchesDijkstraOracle) {
  Rng rng(20240601);
  for (int trial = 0; trial < 20; ++trial) {
    const NavGrid g = random_grid(rng, 32, 32, 0.3);
    for (int q = 0; q < 20; ++q) {
      const int s = pick_open(rng, g), t = pick_open(rng, g);
      const OracleCost want = dijkstra_cost(g.walkable, g.width, g.height, s, t);
      if (!want.reachable) {
        EXPECT_THROW(find_path(g, g.center(s), g.center(t)), NoPath);
        continue;
      }
      const Path p = find_path(g, g.center(s), g.center(t));
      EXPECT_EQ(p.cost.straight, want.straight);
      EXPECT_EQ(p.cost.diagonal, want.diagonal);
      EXPECT_EQ(recount(g, p.cells), p.cost);
      EXPECT_EQ(p.cells.front(), s);
      EXPECT_EQ(p.cells.back(), t);
    }
  }
}

TEST(Nav, SmoothedWaypointsAreMutuallyVisible) {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const NavGrid g = random_grid(rng, 32, 32, 0.25);
    const int s = pick_open(rng, g), t = pick_open(rng, g);
    Path p;
    try {
      p = find_path(g, g.center(s), g.center(t));
    } catch (const NoPath&) {
      continue;
    }
    ASSERT_GE(p.waypoints.size(), 1u);
    double len = 0;
    for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
      EXPECT_TRUE(line_of_sight(g, p.waypoints[i - 1], p.waypoints[i]));
      len += planar_distance(p.waypoints[i - 1], p.waypoints[i]);
    }
    EXPECT_NEAR(p.length, len, 1e-9);
    EXPECT_LE(len, p.cost.value() * g.cell_size + 1e-9);
  }
}

TEST(Nav, StraightCorridorSmoothsToTwoPoints) {
  NavGrid g;
  g.cell_size = 1.0;
  g.width = 10;
  g.height = 1;
  g.walkable.assign(10, 1);
  const Path p = find_path(g, g.center(0), g.center(9));
  ASSERT_EQ(p.waypoints.size(), 2u);
  EXPECT_DOUBLE_EQ(p.length, 9.0);
}

TEST(Nav, LineOfSightIsSymmetric) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const NavGrid g = random_grid(rng, 24, 24, 0.2);
    for (int q = 0; q < 100; ++q) {
      const Vec3 a{rng.uniform(0, 24), 0, rng.uniform(0, 24)};
      const Vec3 b{rng.uniform(0, 24), 0, rng.uniform(0, 24)};
      EXPECT_EQ(line_of_sight(g, a, b), line_of_sight(g, b, a));
    }
  }
}

TEST(Nav, SupercoverIncludesCornerTouches) {
  NavGrid g;
  g.cell_size = 1.0;
  g.width = 3;
  g.height = 3;
  g.walkable.assign(9, 1);
  const auto cells = supercover(g, {0.5, 0, 0.5}, {1.5, 0, 1.5});
  std::set<int> idx;
  for (const auto& c : cells) idx.insert(g.index(c));
  EXPECT_TRUE(idx.contains(0) && idx.contains(1) && idx.contains(3) && idx.contains(4));
  g.walkable[1] = 0;
  EXPECT_FALSE(line_of_sight(g, {0.5, 0, 0.5}, {1.5, 0, 1.5}));
}

TEST(Nav, SnapAndUnsnappable) {
  NavGrid g;
  g.cell_size = 0.25;
  g.width = 8;
  g.height = 8;
  g.walkable.assign(64, 0);
  g.walkable[g.index({4, 4})] = 1;
  EXPECT_EQ(snap_to_walkable(g, {1.1, 0, 1.1}), g.index({4, 4}));
  EXPECT_EQ(snap_to_walkable(g, {0.1, 0, 0.1}), std::nullopt);
  EXPECT_THROW(find_path(g, {0.1, 0, 0.1}, {1.1, 0, 1.1}), UnsnappableEndpoint);
}

TEST(Nav, InteractionPointFacesTableAgainstWall) {
  SceneSpec s = open_room();
  s.objects.push_back(floor_object(1, "side_table", 3.0, 0.36));
  const NavGrid g = planning_grid(s, cat(), s.user_spawn);
  const Pose p = interaction_point(s, cat(), g, 1);
  const Rect fp = world_aabb(s, cat(), 1).footprint();
  EXPECT_LE(fp.distance_to(p.position.x, p.position.z), kDefaultReach);
  EXPECT_GT(p.position.z, fp.max_z);
  const Vec3 c = fp.center();
  EXPECT_LT(std::abs(normalize_yaw(heading_of(c.x - p.position.x, c.z - p.position.z) - p.yaw)), 1.0);
  EXPECT_TRUE(g.is_walkable(*g.cell_of(p.position)));
}

TEST(Nav, UnreachableObject) {
  SceneSpec s = open_room();
  s.objects.push_back(floor_object(1, "side_table", 3.0, 3.0));
  NavGrid g = planning_grid(s, cat(), s.user_spawn);
  block_area(g, Rect{0, 0, 6, 6});
  EXPECT_THROW(interaction_point(s, cat(), g, 1), Unreachable);
}

TEST(Nav, RetainComponentKeepsOnlyStart) {
  const SceneSpec s = two_rooms();
  SceneSpec sealed = s;
  sealed.doors.clear();
  NavGrid g = build_nav_grid(sealed, cat());
  const int start = g.index(*g.cell_of({1.0, 0, 1.0}));
  retain_component(g, start);
  EXPECT_TRUE(g.is_walkable(start));
  EXPECT_FALSE(g.is_walkable(*g.cell_of({7.0, 0, 3.0})));
}

TEST(Nav, ObstaclesAreInflated) {
  SceneSpec s = open_room();
  s.objects.push_back(floor_object(1, "side_table", 3.0, 3.0));
  const NavGrid g = build_nav_grid(s, cat(), 0.25);
  for (int i = 0; i < g.width * g.height; ++i) {
    const Vec3 c = g.center(i);
    const double d = Rect{2.7, 2.7, 3.3, 3.3}.distance_to(c.x, c.z);
    if (d < 0.25 - 1e-9) EXPECT_FALSE(g.is_walkable(i));
  }
  EXPECT_EQ(to_pgm(g).substr(0, 2), "P5");
}
