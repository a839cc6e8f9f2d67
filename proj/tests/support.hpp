#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <hearth/nav.hpp>
#include <hearth/planner.hpp>
#include <hearth/rng.hpp>
#include <hearth/scene.hpp>
#include <hearth/sim.hpp>

namespace hearth::test {

inline ObjectInstance floor_object(ObjectId id, const std::string& asset, double x, double z, double yaw = 0.0) {
  const auto& a = AssetCatalog::builtin()->at(asset);
  ObjectInstance o;
  o.id = id;
  o.asset = asset;
  o.position = {x, a.half_extents.y, z};
  o.yaw = yaw;
  if (a.is_openable) o.open_state = false;
  return o;
}

/// Small object resting on the top face of `parent`.
inline ObjectInstance on_top(ObjectId id, const std::string& asset, const ObjectInstance& parent, double x, double z,
                             double yaw = 0.0) {
  const auto& cat = *AssetCatalog::builtin();
  const AABB box = world_aabb(parent, cat.at(parent.asset));
  ObjectInstance o;
  o.id = id;
  o.asset = asset;
  o.position = {x, box.max.y + cat.at(asset).half_extents.y, z};
  o.yaw = yaw;
  o.parent_receptacle = parent.id;
  return o;
}

/// Empty single room [0, w] x [0, d] with the user parked in the far corner.
inline SceneSpec open_room(double w = 6.0, double d = 6.0) {
  SceneSpec s;
  s.seed = 7;
  s.rooms.push_back({0, Rect{0, 0, w, d}, "living"});
  s.agent_spawn = {{1.0, 0.0, 1.0}, 0.0};
  s.user_spawn = {{w - 0.7, 0.0, d - 0.7}, 180.0};
  return s;
}

/// Two rooms side by side along x, joined by one door in the shared wall at x = w.
inline SceneSpec two_rooms(double w = 4.0, double d = 4.0, double door_z = 2.0) {
  SceneSpec s;
  s.seed = 11;
  s.rooms.push_back({0, Rect{0, 0, w, d}, "living"});
  s.rooms.push_back({1, Rect{w, 0, 2 * w, d}, "kitchen"});
  s.doors.push_back({0, 0, 1, {w, 0.0, door_z}, 1.2});
  s.agent_spawn = {{1.0, 0.0, 1.0}, 0.0};
  s.user_spawn = {{2 * w - 1.0, 0.0, d - 1.0}, 180.0};
  return s;
}

/// Scene, start pose and pitch for "where is the orange":
/// from the start the first waypoint bears 59 degrees left, the interaction point lies
/// 1.2 m further on, and from there the orange is 35 degrees left. A teddy bear on the
/// sofa hides the orange until the last step.
struct OrangeFixture {
  SceneSpec scene;
  ObjectId sofa = 0;
  ObjectId orange = 36;
  ObjectId bear = 2;
  Pose interaction;
  double pitch = 0.0;
};

inline OrangeFixture orange_fixture() {
  OrangeFixture f;
  const auto& cat = *AssetCatalog::builtin();
  SceneSpec s = open_room();
  const ObjectInstance sofa = floor_object(f.sofa, "sofa", 3.0, 0.5);
  s.objects.push_back(sofa);
  s.objects.push_back(on_top(f.orange, "orange", sofa, 2.4, 0.5));
  s.objects.push_back(on_top(f.bear, "teddy_bear", sofa, 2.52, 0.75));
  s.user_spawn = {{5.3, 0.0, 5.3}, 180.0};

  const NavGrid grid = planning_grid(s, cat, s.user_spawn);
  f.interaction = interaction_point(s, cat, grid, f.orange);
  const Vec3 o = world_aabb(s, cat, f.orange).center();
  const Vec3 ip = f.interaction.position;
  const double to_orange = heading_of(o.x - ip.x, o.z - ip.z);
  const double travel = to_orange + 35.0;
  s.agent_spawn = {ip - planar_forward(travel) * 1.2, normalize_yaw(travel + 59.0)};
  const double eye = SimConfig{}.eye_height;
  f.pitch = rad_to_deg(std::atan2(o.y - eye, std::hypot(o.x - ip.x, o.z - ip.z)));
  f.scene = std::move(s);
  return f;
}

inline EnvState orange_env(const OrangeFixture& f) {
  EnvState env = reset(f.scene, AssetCatalog::builtin());
  env.agent.pitch = f.pitch;
  return env;
}

// ------------------------------------------------------------ grid oracle

/// Exact comparison of a1 + b1*sqrt(2) against a2 + b2*sqrt(2).
inline int compare_octile(std::int64_t a1, std::int64_t b1, std::int64_t a2, std::int64_t b2) {
  const std::int64_t da = a1 - a2, db = b1 - b2;
  // sign(da + db*sqrt2)
  if (da >= 0 && db >= 0) return (da == 0 && db == 0) ? 0 : 1;
  if (da <= 0 && db <= 0) return -1;
  const std::int64_t l = da * da, r = 2 * db * db;
  if (da > 0) return l > r ? 1 : -1;
  return r > l ? 1 : -1;
}

struct OracleCost {
  std::int64_t straight = 0;
  std::int64_t diagonal = 0;
  bool reachable = false;
};

/// Plain Dijkstra over the 8-connected grid, no corner cutting, exact costs.
inline OracleCost dijkstra_cost(const std::vector<std::uint8_t>& open, int w, int h, int start, int goal) {
  struct Entry {
    std::int64_t a, b;
    int cell;
  };
  auto worse = [](const Entry& x, const Entry& y) { return compare_octile(x.a, x.b, y.a, y.b) > 0; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> pq(worse);
  const std::int64_t inf = std::numeric_limits<std::int32_t>::max();
  std::vector<std::int64_t> da(open.size(), inf), db(open.size(), inf);
  std::vector<char> done(open.size(), 0);
  auto free_at = [&](int x, int z) { return x >= 0 && z >= 0 && x < w && z < h && open[z * w + x]; };
  if (!open[start] || !open[goal]) return {};
  da[start] = db[start] = 0;
  pq.push({0, 0, start});
  while (!pq.empty()) {
    const Entry e = pq.top();
    pq.pop();
    if (done[e.cell]) continue;
    done[e.cell] = 1;
    if (e.cell == goal) return {e.a, e.b, true};
    const int x = e.cell % w, z = e.cell / w;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dz) continue;
        if (!free_at(x + dx, z + dz)) continue;
        const bool diag = dx && dz;
        if (diag && (!free_at(x + dx, z) || !free_at(x, z + dz))) continue;
        const int n = (z + dz) * w + x + dx;
        const std::int64_t na = e.a + (diag ? 0 : 1), nb = e.b + (diag ? 1 : 0);
        if (da[n] == inf || compare_octile(na, nb, da[n], db[n]) < 0) {
          da[n] = na;
          db[n] = nb;
          pq.push({na, nb, n});
        }
      }
  }
  return {};
}

/// Random obstacle grid with the given blocked fraction.
inline NavGrid random_grid(Rng& rng, int w, int h, double blocked) {
  NavGrid g;
  g.origin = {0, 0, 0};
  g.cell_size = 1.0;
  g.width = w;
  g.height = h;
  g.walkable.resize(static_cast<std::size_t>(w * h));
  for (auto& c : g.walkable) c = rng.chance(blocked) ? 0 : 1;
  return g;
}

/// Empty when both spawns and every interaction point share one component of the
/// planning grid; otherwise a description of the first problem.
inline std::optional<std::string> connectivity_problem(const SceneSpec& s, const AssetCatalog& cat) {
  NavGrid g = planning_grid(s, cat, s.user_spawn);
  const auto start = snap_to_walkable(g, s.agent_spawn.position);
  if (!start) return "agent spawn not on the grid";
  const auto labels = component_labels(g);
  const int comp = labels[*start];
  NavGrid masked = g;
  retain_component(masked, *start);
  for (const auto& o : s.objects) {
    Pose p;
    try {
      p = interaction_point(s, cat, masked, o.id);
    } catch (const Error& e) {
      return "object " + std::to_string(o.id) + ": " + e.what();
    }
    const auto c = g.cell_of(p.position);
    if (!c || labels[g.index(*c)] != comp) return "object " + std::to_string(o.id) + " outside the agent component";
  }
  // The user stands inside the keep-out square; some cell near them must be in the component.
  for (int i = 0; i < g.width * g.height; ++i)
    if (labels[i] == comp && planar_distance(g.center(i), s.user_spawn.position) <= kUserApproach + 1e-9)
      return std::nullopt;
  return "user not reachable";
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("hearth_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace hearth::test
