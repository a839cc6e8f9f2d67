#include "hearth/procgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hearth/nav.hpp"
#include "hearth/planner.hpp"
#include "hearth/rng.hpp"
#include "hearth/taskgen.hpp"

namespace hearth {

namespace {

constexpr std::array<std::string_view, 4> kKinds{"livingroom", "bedroom", "kitchen", "bathroom"};

constexpr std::array<std::string_view, 8> kLivingFurniture{"sofa",     "armchair",  "coffee_table", "side_table",
                                                           "tv_stand", "bookshelf", "floor_lamp",   "plant"};
constexpr std::array<std::string_view, 7> kBedroomFurniture{"bed",      "drawer",    "desk", "chair",
                                                            "wardrobe", "bookshelf", "plant"};
constexpr std::array<std::string_view, 6> kKitchenFurniture{"fridge", "kitchen_counter", "dining_table",
                                                            "chair",  "cabinet",         "plant"};
constexpr std::array<std::string_view, 5> kBathroomFurniture{"bathtub", "toilet", "sink_cabinet", "cabinet", "plant"};

constexpr std::array<std::string_view, 16> kLivingSmall{"orange", "apple",  "banana", "cup",     "mug",      "book",
                                                        "remote", "phone",  "vase",   "candle",  "toy_car",  "teddy_bear",
                                                        "keys",   "pillow", "plate",  "bowl"};
constexpr std::array<std::string_view, 11> kBedroomSmall{"book",   "phone",   "laptop", "candle", "teddy_bear", "keys",
                                                         "pillow", "mug",     "cup",    "remote", "toy_car"};
constexpr std::array<std::string_view, 10> kKitchenSmall{"orange", "apple", "banana", "cup",  "mug",
                                                         "plate",  "bowl",  "bottle", "keys", "phone"};
constexpr std::array<std::string_view, 5> kBathroomSmall{"soap", "towel", "bottle", "candle", "cup"};

constexpr double kSurfaceGap = 0.02;
constexpr double kFloorGap = 0.05;
constexpr double kPlanRadius = kDefaultAgentRadius + kPlanningClearance;
constexpr double kMinRoomSide = 2.0;
constexpr double kDoorKeepDepth = 1.0;
constexpr double kDoorKeepSide = 0.3;
constexpr double kUserDoorDistance = 1.5;
constexpr double kTaskSpawnSeparation = 2.5;
constexpr double kSmallObjectStand = 1.0;

/// Internal signal that one generation attempt ran out of options.
struct Starved {
  std::string stage;
  std::string detail;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

double snap_quarter(double v) { return std::round(v * 4.0) / 4.0; }

struct Generator {
  std::uint64_t seed;
  const ProcGenConfig& cfg;
  std::span<const PlacementConstraint> constraints;
  const AssetCatalog& catalog;
  Rng rng;

  Generator(std::uint64_t s, const ProcGenConfig& c, std::span<const PlacementConstraint> cons, const AssetCatalog& cat,
            Rng r)
      : seed(s), cfg(c), constraints(cons), catalog(cat), rng(r) {}

  SceneSpec scene;
  std::vector<Rect> door_keepouts;
  std::set<std::string> reserved;  ///< constraint assets that must stay unique
  std::map<std::size_t, int> constraint_room;

  // ------------------------------------------------------------ layout
  void layout() {
    Rng r = rng.split("layout");
    const double e = cfg.extent();
    std::vector<Rect> leaves{{0.0, 0.0, e, e}};
    while (static_cast<int>(leaves.size()) < cfg.room_count) {
      std::size_t idx = 0;
      for (std::size_t i = 1; i < leaves.size(); ++i)
        if (leaves[i].area() > leaves[idx].area() + 1e-9) idx = i;
      const Rect cur = leaves[idx];
      bool split_x = cur.width() > cur.depth() + 1e-9 || (std::fabs(cur.width() - cur.depth()) <= 1e-9 && r.chance(0.5));
      bool done = false;
      for (int t = 0; t < 20 && !done; ++t) {
        const double f = r.uniform(0.35, 0.65);
        Rect a = cur, b = cur;
        if (split_x) {
          const double line = snap_quarter(cur.min_x + f * cur.width());
          a.max_x = line;
          b.min_x = line;
        } else {
          const double line = snap_quarter(cur.min_z + f * cur.depth());
          a.max_z = line;
          b.min_z = line;
        }
        auto ok = [](const Rect& x) {
          return x.width() >= kMinRoomSide - 1e-9 && x.depth() >= kMinRoomSide - 1e-9 && x.area() >= kMinRoomArea;
        };
        if (ok(a) && ok(b)) {
          leaves[idx] = a;
          leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(idx) + 1, b);
          done = true;
        }
      }
      if (!done) throw Starved{"layout", "could not split a room into two valid rooms"};
    }

    std::vector<std::string> kinds;
    if (cfg.room_count == 1) {
      kinds.emplace_back(kKinds[r.index(kKinds.size())]);
    } else {
      std::vector<std::string> rest{"bedroom", "kitchen", "bathroom"};
      shuffle(rest, r);
      std::size_t largest = 0;
      for (std::size_t i = 1; i < leaves.size(); ++i)
        if (leaves[i].area() > leaves[largest].area() + 1e-9) largest = i;
      std::size_t next = 0;
      for (std::size_t i = 0; i < leaves.size(); ++i) kinds.push_back(i == largest ? "livingroom" : rest[next++]);
    }
    // Make sure every kind a constraint asks for exists.
    std::vector<bool> pinned(kinds.size(), false);
    for (const auto& c : constraints) {
      if (!c.room_kind) continue;
      auto it = std::find(kinds.begin(), kinds.end(), *c.room_kind);
      if (it != kinds.end()) {
        pinned[static_cast<std::size_t>(it - kinds.begin())] = true;
        continue;
      }
      std::size_t slot = kinds.size();
      for (std::size_t i = 0; i < kinds.size(); ++i)
        if (!pinned[i] && kinds[i] != "livingroom") {
          slot = i;
          break;
        }
      if (slot == kinds.size())
        for (std::size_t i = 0; i < kinds.size(); ++i)
          if (!pinned[i]) {
            slot = i;
            break;
          }
      if (slot == kinds.size()) throw UnsatisfiableConstraint("too many room kinds requested for " + std::to_string(cfg.room_count) + " room(s)");
      kinds[slot] = *c.room_kind;
      pinned[slot] = true;
    }
    for (std::size_t i = 0; i < leaves.size(); ++i)
      scene.rooms.push_back(Room{static_cast<int>(i), leaves[i], kinds[i]});
  }

  // ------------------------------------------------------------ doors
  void doors() {
    Rng r = rng.split("doors");
    struct Edge {
      int a, b;
      bool vertical;  // wall runs along z at x = line
      double line, lo, hi;
    };
    std::vector<Edge> edges;
    const double need = kDoorWidth + 2 * kDoorCornerMargin + 0.1;
    for (std::size_t i = 0; i < scene.rooms.size(); ++i) {
      for (std::size_t j = i + 1; j < scene.rooms.size(); ++j) {
        const Rect& p = scene.rooms[i].bounds;
        const Rect& q = scene.rooms[j].bounds;
        auto add = [&](bool vertical, double line, double lo, double hi) {
          if (hi - lo >= need - 1e-9) edges.push_back({static_cast<int>(i), static_cast<int>(j), vertical, line, lo, hi});
        };
        if (std::fabs(p.max_x - q.min_x) < 1e-9 || std::fabs(q.max_x - p.min_x) < 1e-9) {
          const double line = std::fabs(p.max_x - q.min_x) < 1e-9 ? p.max_x : p.min_x;
          add(true, line, std::max(p.min_z, q.min_z), std::min(p.max_z, q.max_z));
        }
        if (std::fabs(p.max_z - q.min_z) < 1e-9 || std::fabs(q.max_z - p.min_z) < 1e-9) {
          const double line = std::fabs(p.max_z - q.min_z) < 1e-9 ? p.max_z : p.min_z;
          add(false, line, std::max(p.min_x, q.min_x), std::min(p.max_x, q.max_x));
        }
      }
    }
    shuffle(edges, r);
    std::vector<int> parent(scene.rooms.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    for (const auto& e : edges) {
      const int ra = root(e.a), rb = root(e.b);
      if (ra == rb) continue;
      parent[ra] = rb;
      // Door centres sit on the 0.25 m lattice so door cells align with the grid.
      const double first = std::ceil((e.lo + kDoorWidth / 2 + kDoorCornerMargin) * 4.0 - 1e-9) / 4.0;
      const double last = std::floor((e.hi - kDoorWidth / 2 - kDoorCornerMargin) * 4.0 + 1e-9) / 4.0;
      if (last < first - 1e-9) continue;
      const auto steps = static_cast<std::int64_t>(std::llround((last - first) * 4.0));
      const double along = first + 0.25 * static_cast<double>(r.uniform_int(0, steps));
      Door d;
      d.id = static_cast<int>(scene.doors.size());
      d.room_a = e.a;
      d.room_b = e.b;
      d.width = kDoorWidth;
      d.center = e.vertical ? Vec3{e.line, 0.0, along} : Vec3{along, 0.0, e.line};
      scene.doors.push_back(d);
      const double hw = kDoorWidth / 2 + kDoorKeepSide;
      door_keepouts.push_back(e.vertical ? Rect{e.line - kDoorKeepDepth, along - hw, e.line + kDoorKeepDepth, along + hw}
                                         : Rect{along - hw, e.line - kDoorKeepDepth, along + hw, e.line + kDoorKeepDepth});
    }
    for (std::size_t i = 0; i < scene.rooms.size(); ++i)
      if (root(static_cast<int>(i)) != root(0)) throw Starved{"doors", "room adjacency graph is disconnected"};
  }

  // ------------------------------------------------------------ connectivity
  struct Reach {
    NavGrid grid;
    std::vector<int> labels;
    int main = -1;
  };

  Reach reach_of(const SceneSpec& s) const {
    Reach r;
    r.grid = build_nav_grid(s, catalog, kPlanRadius);
    r.labels = component_labels(r.grid);
    std::map<int, int> sizes;
    for (int l : r.labels)
      if (l >= 0) ++sizes[l];
    int best = 0;
    for (const auto& [l, n] : sizes)
      if (n > best) {
        best = n;
        r.main = l;
      }
    return r;
  }

  bool in_main(const Reach& r, const Vec3& p) const {
    const auto c = r.grid.cell_of(p);
    return c && r.grid.is_walkable(*c) && r.labels[static_cast<std::size_t>(r.grid.index(*c))] == r.main;
  }

  bool object_reachable(const Reach& r, const SceneSpec& s, ObjectId id) const {
    try {
      const Pose p = interaction_point(s, catalog, r.grid, id);
      if (!in_main(r, p.position)) return false;
      const ObjectInstance& o = *s.find_object(id);
      if (!o.parent_receptacle) return true;
      // Small objects must be close enough to stay visible in low-res renders.
      return world_aabb(o, catalog.at(o.asset)).footprint().distance_to(p.position.x, p.position.z) <= kSmallObjectStand;
    } catch (const Unreachable&) {
      return false;
    }
  }

  bool connected(const SceneSpec& s) const {
    const Reach r = reach_of(s);
    if (r.main < 0) return false;
    for (const auto& d : s.doors) {
      const Room* ra = nullptr;
      for (const auto& room : s.rooms)
        if (room.id == d.room_a) ra = &room;
      const bool vertical = ra && (std::fabs(ra->bounds.min_x - d.center.x) < 1e-9 || std::fabs(ra->bounds.max_x - d.center.x) < 1e-9);
      const double off = 0.625;
      const Vec3 p1 = vertical ? Vec3{d.center.x - off, 0, d.center.z + 0.125} : Vec3{d.center.x + 0.125, 0, d.center.z - off};
      const Vec3 p2 = vertical ? Vec3{d.center.x + off, 0, d.center.z + 0.125} : Vec3{d.center.x + 0.125, 0, d.center.z + off};
      if (!in_main(r, p1) || !in_main(r, p2)) return false;
    }
    for (const auto& o : s.objects)
      if (!object_reachable(r, s, o.id)) return false;
    return true;
  }

  // ------------------------------------------------------------ furniture
  const Room& room(int id) const { return scene.rooms[static_cast<std::size_t>(id)]; }

  void assign_constraints() {
    Rng r = rng.split("constraints");
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      const auto& c = constraints[i];
      std::vector<int> options;
      for (const auto& rm : scene.rooms)
        if (!c.room_kind || rm.kind == *c.room_kind) options.push_back(rm.id);
      if (options.empty()) throw UnsatisfiableConstraint("no room of kind '" + c.room_kind.value_or("") + "'");
      // Constraints sharing a receptacle share its room.
      int chosen = options[r.index(options.size())];
      for (std::size_t j = 0; j < i; ++j)
        if (c.required_receptacle && constraints[j].required_receptacle == c.required_receptacle)
          chosen = constraint_room[j];
      constraint_room[i] = chosen;
      reserved.insert(c.required_asset);
      if (c.required_receptacle) reserved.insert(*c.required_receptacle);
    }
  }

  bool has_asset(std::string_view name) const {
    return std::any_of(scene.objects.begin(), scene.objects.end(), [&](const ObjectInstance& o) { return o.asset == name; });
  }

  std::optional<ObjectInstance> try_floor(const Room& rm, const AssetSpec& a, Rng& r) {
    const Rect inner = rm.bounds.inflated(-(kWallThickness / 2 + 0.01));
    const bool wall = a.is_receptacle ? r.chance(0.8) : r.chance(0.5);
    ObjectInstance o;
    o.asset = a.name;
    double ex, ez;
    if (wall) {
      const int side = static_cast<int>(r.index(4));
      static constexpr double kYaw[4] = {90.0, -90.0, 0.0, 180.0};  // back against the wall
      o.yaw = kYaw[side];
      const bool swap = side < 2;
      ex = swap ? a.half_extents.z : a.half_extents.x;
      ez = swap ? a.half_extents.x : a.half_extents.z;
      if (side < 2) {
        if (inner.depth() < 2 * ez) return std::nullopt;
        o.position.x = side == 0 ? inner.min_x + ex : inner.max_x - ex;
        o.position.z = r.uniform(inner.min_z + ez, inner.max_z - ez);
      } else {
        if (inner.width() < 2 * ex) return std::nullopt;
        o.position.z = side == 2 ? inner.min_z + ez : inner.max_z - ez;
        o.position.x = r.uniform(inner.min_x + ex, inner.max_x - ex);
      }
    } else {
      const int quarter = static_cast<int>(r.index(4));
      o.yaw = quarter * 90.0 - (quarter == 3 ? 360.0 : 0.0);
      const bool swap = quarter % 2 == 1;
      ex = swap ? a.half_extents.z : a.half_extents.x;
      ez = swap ? a.half_extents.x : a.half_extents.z;
      if (inner.width() < 2 * ex || inner.depth() < 2 * ez) return std::nullopt;
      o.position.x = r.uniform(inner.min_x + ex, inner.max_x - ex);
      o.position.z = r.uniform(inner.min_z + ez, inner.max_z - ez);
    }
    o.position = {quantize_mm(o.position.x), quantize_mm(a.half_extents.y), quantize_mm(o.position.z)};
    if (a.is_openable) o.open_state = false;
    const Rect fp = world_aabb(o, a).footprint();
    if (!inner.contains(fp, 1e-9)) return std::nullopt;
    for (const auto& k : door_keepouts)
      if (k.overlaps(fp)) return std::nullopt;
    for (const auto& other : scene.objects) {
      if (other.parent_receptacle) continue;
      if (world_aabb(other, catalog.at(other.asset)).footprint().inflated(kFloorGap).overlaps(fp)) return std::nullopt;
    }
    return o;
  }

  /// Places one floor asset; returns its id or nullopt after exhausting attempts.
  std::optional<ObjectId> place_floor(const Room& rm, const AssetSpec& a, Rng& r) {
    for (int t = 0; t < cfg.max_placement_attempts; ++t) {
      auto o = try_floor(rm, a, r);
      if (!o) continue;
      o->id = static_cast<ObjectId>(scene.objects.size());
      scene.objects.push_back(*o);
      if (connected(scene)) return o->id;
      scene.objects.pop_back();
    }
    return std::nullopt;
  }

  void furniture() {
    for (const auto& rm : scene.rooms) {
      Rng r = rng.split("furniture").split(static_cast<std::uint64_t>(rm.id));
      std::vector<std::string> forced;
      for (std::size_t i = 0; i < constraints.size(); ++i) {
        if (constraint_room[i] != rm.id) continue;
        const auto& c = constraints[i];
        if (c.required_receptacle) {
          if (std::find(forced.begin(), forced.end(), *c.required_receptacle) == forced.end())
            forced.push_back(*c.required_receptacle);
        } else if (catalog.at(c.required_asset).placement == Placement::floor) {
          forced.push_back(c.required_asset);
        }
      }
      std::vector<std::string> pool;
      for (auto n : furniture_for(rm.kind))
        if (!reserved.contains(std::string(n)) && catalog.find(n)) pool.emplace_back(n);
      shuffle(pool, r);
      const int k = static_cast<int>(r.uniform_int(cfg.furniture_per_room.lo, cfg.furniture_per_room.hi));
      std::vector<std::string> picked(pool.begin(), pool.begin() + std::min<std::ptrdiff_t>(k, std::ssize(pool)));
      auto surface_ok = [&](const std::string& n) {
        const auto& a = catalog.at(n);
        return a.is_receptacle && !a.is_openable;
      };
      const bool has_surface = std::any_of(picked.begin(), picked.end(), surface_ok) ||
                               std::any_of(forced.begin(), forced.end(), surface_ok);
      if (!has_surface)
        for (const auto& n : pool)
          if (surface_ok(n)) {
            picked.push_back(n);
            break;
          }
      auto area = [&](const std::string& n) {
        const auto& a = catalog.at(n);
        return a.half_extents.x * a.half_extents.z;
      };
      std::stable_sort(picked.begin(), picked.end(), [&](const std::string& x, const std::string& y) {
        const bool rx = catalog.at(x).is_receptacle, ry = catalog.at(y).is_receptacle;
        if (rx != ry) return rx;
        return area(x) > area(y);
      });
      for (const auto& n : forced) {
        if (has_asset(n)) throw UnsatisfiableConstraint("asset '" + n + "' is required more than once");
        if (!place_floor(rm, catalog.at(n), r))
          throw Starved{"furniture", fmt::format("could not place required {} in room {}", n, rm.id)};
      }
      for (const auto& n : picked) place_floor(rm, catalog.at(n), r);
    }
  }

  // ------------------------------------------------------------ small objects
  bool try_surface(const AssetSpec& a, ObjectId receptacle, Rng& r) {
    const auto& parent = *scene.find_object(receptacle);
    const AABB top = world_aabb(parent, catalog.at(parent.asset));
    const Rect surf = top.footprint().inflated(-kSurfaceGap);
    ObjectInstance o;
    o.asset = a.name;
    const int quarter = static_cast<int>(r.index(4));
    o.yaw = quarter * 90.0 - (quarter == 3 ? 360.0 : 0.0);
    const bool swap = quarter % 2 == 1;
    const double ex = swap ? a.half_extents.z : a.half_extents.x;
    const double ez = swap ? a.half_extents.x : a.half_extents.z;
    if (surf.width() < 2 * ex || surf.depth() < 2 * ez) return false;
    o.position = {quantize_mm(r.uniform(surf.min_x + ex, surf.max_x - ex)), quantize_mm(top.max.y + a.half_extents.y),
                  quantize_mm(r.uniform(surf.min_z + ez, surf.max_z - ez))};
    o.parent_receptacle = receptacle;
    const Rect fp = world_aabb(o, a).footprint();
    if (!surf.contains(fp, 1e-9)) return false;
    for (const auto& s : scene.objects)
      if (s.parent_receptacle == receptacle && world_aabb(s, catalog.at(s.asset)).footprint().inflated(kSurfaceGap).overlaps(fp))
        return false;
    o.id = static_cast<ObjectId>(scene.objects.size());
    scene.objects.push_back(o);
    return true;
  }

  std::vector<ObjectId> surfaces_in(int room_id, bool allow_small_receptacles) const {
    std::vector<ObjectId> out;
    for (const auto& o : scene.objects) {
      const auto& a = catalog.at(o.asset);
      if (!a.is_receptacle || a.is_openable || reserved.contains(o.asset)) continue;
      if (a.is_grabbable && (!allow_small_receptacles || !o.parent_receptacle)) continue;
      if (!a.is_grabbable && o.parent_receptacle) continue;
      const ObjectInstance& root = *scene.find_object(root_of(scene, o.id));
      const Room* rm = scene.room_containing(root.position.x, root.position.z);
      if (rm && rm->id == room_id) out.push_back(o.id);
    }
    return out;
  }

  bool place_small(const AssetSpec& a, const std::vector<ObjectId>& receptacles, Rng& r, const Reach& reach) {
    if (receptacles.empty()) return false;
    for (int t = 0; t < cfg.max_placement_attempts; ++t) {
      const ObjectId rec = receptacles[r.index(receptacles.size())];
      if (!try_surface(a, rec, r)) continue;
      if (object_reachable(reach, scene, scene.objects.back().id)) return true;
      scene.objects.pop_back();
    }
    return false;
  }

  void small_objects() {
    const Reach reach = reach_of(scene);
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      const auto& c = constraints[i];
      const auto& a = catalog.at(c.required_asset);
      if (a.placement == Placement::floor) continue;
      Rng r = rng.split("constraint").split(static_cast<std::uint64_t>(i));
      std::vector<ObjectId> recs;
      if (c.required_receptacle) {
        for (const auto& o : scene.objects)
          if (o.asset == *c.required_receptacle) recs.push_back(o.id);
      } else {
        recs = surfaces_in(constraint_room[i], false);
      }
      if (has_asset(c.required_asset)) throw UnsatisfiableConstraint("asset '" + c.required_asset + "' is required more than once");
      if (!place_small(a, recs, r, reach))
        throw Starved{"constraints", fmt::format("could not place required {}", c.required_asset)};
    }
    std::set<std::string> used;
    for (const auto& o : scene.objects) used.insert(o.asset);
    for (const auto& rm : scene.rooms) {
      Rng r = rng.split("small").split(static_cast<std::uint64_t>(rm.id));
      std::vector<std::string> pool;
      for (auto n : small_objects_for(rm.kind))
        if (!reserved.contains(std::string(n)) && !used.contains(std::string(n)) && catalog.find(n)) pool.emplace_back(n);
      shuffle(pool, r);
      const int k = static_cast<int>(r.uniform_int(cfg.small_objects_per_room.lo, cfg.small_objects_per_room.hi));
      int placed = 0;
      for (const auto& n : pool) {
        if (placed >= k) break;
        const bool stack = r.chance(0.3);
        auto recs = surfaces_in(rm.id, stack);
        if (stack) {
          std::vector<ObjectId> smalls;
          for (ObjectId id : recs)
            if (catalog.at(scene.find_object(id)->asset).is_grabbable) smalls.push_back(id);
          if (!smalls.empty()) recs = smalls;
        }
        if (place_small(catalog.at(n), recs, r, reach)) {
          used.insert(n);
          ++placed;
        }
      }
    }
  }

  // ------------------------------------------------------------ spawns
  void spawns() {
    Rng r = rng.split("spawns");
    const Reach free_reach = reach_of(scene);
    std::vector<int> cells;
    for (int i = 0; i < free_reach.grid.width * free_reach.grid.height; ++i)
      if (free_reach.grid.is_walkable(i) && free_reach.labels[static_cast<std::size_t>(i)] == free_reach.main)
        cells.push_back(i);
    if (cells.empty()) throw Starved{"spawns", "no walkable floor"};
    std::vector<int> user_cells;
    for (int i : cells) {
      const Vec3 c = free_reach.grid.center(i);
      bool far = std::all_of(scene.doors.begin(), scene.doors.end(),
                             [&](const Door& d) { return planar_distance(c, d.center) >= kUserDoorDistance; });
      if (far) user_cells.push_back(i);
    }
    if (user_cells.empty()) throw Starved{"spawns", "no user spawn away from doors"};
    for (int t = 0; t < 200; ++t) {
      const Vec3 u = free_reach.grid.center(user_cells[r.index(user_cells.size())]);
      const Vec3 a = free_reach.grid.center(cells[r.index(cells.size())]);
      if (planar_distance(u, a) < cfg.spawn_separation) continue;
      const Pose user{u, static_cast<double>(r.uniform_int(-180, 179))};
      const Pose agent{a, static_cast<double>(r.uniform_int(-180, 179))};
      if (!spawns_ok(agent, user)) continue;
      scene.agent_spawn = agent;
      scene.user_spawn = user;
      return;
    }
    throw Starved{"spawns", "no agent/user spawn pair keeps every target reachable"};
  }

  bool spawns_ok(const Pose& agent, const Pose& user) const {
    NavGrid g = planning_grid(scene, catalog, user);
    const auto start = g.cell_of(agent.position);
    if (!start || !g.is_walkable(*start)) return false;
    retain_component(g, g.index(*start));
    for (const auto& o : scene.objects) {
      try {
        interaction_point(scene, catalog, g, o.id);
      } catch (const Unreachable&) {
        return false;
      }
    }
    const Rect keepout = Rect{user.position.x, user.position.z, user.position.x, user.position.z}.inflated(kUserKeepout + 1e-9);
    for (int i = 0; i < g.width * g.height; ++i) {
      if (!g.is_walkable(i)) continue;
      const Vec3 c = g.center(i);
      if (planar_distance(c, user.position) <= kUserApproach && line_of_sight(g, c, user.position, keepout)) return true;
    }
    return false;
  }

  SceneSpec run() {
    scene.seed = seed;
    layout();
    doors();
    assign_constraints();
    furniture();
    small_objects();
    spawns();
    const auto v = validate_scene(scene, catalog);
    if (!v.empty()) throw Starved{"validation", v.front().message};
    return scene;
  }
};

void check_constraints(std::span<const PlacementConstraint> constraints, const AssetCatalog& catalog) {
  for (const auto& c : constraints) {
    const auto* a = catalog.find(c.required_asset);
    if (!a) throw UnsatisfiableConstraint("unknown asset '" + c.required_asset + "'");
    if (c.room_kind && std::find(kKinds.begin(), kKinds.end(), *c.room_kind) == kKinds.end())
      throw UnsatisfiableConstraint("unknown room kind '" + *c.room_kind + "'");
    if (c.required_receptacle) {
      const auto* r = catalog.find(*c.required_receptacle);
      if (!r) throw UnsatisfiableConstraint("unknown asset '" + *c.required_receptacle + "'");
      if (!r->is_receptacle) throw UnsatisfiableConstraint("'" + r->name + "' is not a receptacle");
      if (r->is_openable || r->placement != Placement::floor)
        throw UnsatisfiableConstraint("'" + r->name + "' cannot hold generated objects (must be an open floor receptacle)");
      if (a->placement != Placement::surface)
        throw UnsatisfiableConstraint("'" + a->name + "' stands on the floor and cannot go on a receptacle");
    }
  }
}

}  // namespace

StillInvalidAfterRepairs::StillInvalidAfterRepairs(std::vector<std::string> violations)
    : Error(fmt::format("scene still invalid after repairs ({} violation(s))", violations.size())),
      violations_(std::move(violations)) {}

void ProcGenConfig::validate() const {
  if (room_count < 1 || room_count > 4) throw Error("room_count must be between 1 and 4");
  if (house_extent != 0.0 && (house_extent < 6.0 || house_extent > 16.0)) throw Error("house_extent must lie in [6, 16] m");
  if (extent() * extent() < room_count * kMinRoomArea) throw Error("house too small for the requested rooms");
  if (furniture_per_room.lo < 0 || furniture_per_room.lo > furniture_per_room.hi) throw Error("bad furniture_per_room range");
  if (small_objects_per_room.lo < 0 || small_objects_per_room.lo > small_objects_per_room.hi)
    throw Error("bad small_objects_per_room range");
  if (max_placement_attempts < 1) throw Error("max_placement_attempts must be positive");
  if (!(spawn_separation >= 0)) throw Error("spawn_separation must be non-negative");
}

double ProcGenConfig::extent() const {
  if (house_extent > 0) return house_extent;
  static constexpr double kByRooms[5] = {6.0, 6.0, 8.0, 9.0, 10.0};
  return kByRooms[std::clamp(room_count, 1, 4)];
}

std::span<const std::string_view> room_kinds() { return kKinds; }

std::span<const std::string_view> furniture_for(std::string_view k) {
  if (k == "bedroom") return kBedroomFurniture;
  if (k == "kitchen") return kKitchenFurniture;
  if (k == "bathroom") return kBathroomFurniture;
  return kLivingFurniture;
}

std::span<const std::string_view> small_objects_for(std::string_view k) {
  if (k == "bedroom") return kBedroomSmall;
  if (k == "kitchen") return kKitchenSmall;
  if (k == "bathroom") return kBathroomSmall;
  return kLivingSmall;
}

SceneSpec generate_house(std::uint64_t seed, const ProcGenConfig& config, std::span<const PlacementConstraint> constraints,
                         const AssetCatalog& catalog) {
  config.validate();
  check_constraints(constraints, catalog);
  Starved last{"layout", "no attempt made"};
  for (int attempt = 0; attempt < kSceneAttempts; ++attempt) {
    Generator g(seed, config, constraints, catalog, Rng(seed).split(static_cast<std::uint64_t>(attempt)));
    try {
      return g.run();
    } catch (const Starved& s) {
      last = s;
    }
  }
  throw GenerationFailed(last.stage, last.detail);
}

std::pair<SceneSpec, TaskInstance> generate_scene_for_task(std::uint64_t seed, TaskTemplate tmpl,
                                                           const ProcGenConfig& config, const AssetCatalog& catalog,
                                                           const TaskHints& hints) {
  Rng r = Rng(seed).split("task");
  ProcGenConfig cfg = config;
  if (tmpl == TaskTemplate::come_here || tmpl == TaskTemplate::bring_me)
    cfg.spawn_separation = std::max(cfg.spawn_separation, kTaskSpawnSeparation);

  auto pick = [&](std::span<const std::string_view> items, auto&& keep) -> std::string {
    std::vector<std::string> ok;
    for (auto n : items)
      if (catalog.find(n) && keep(catalog.at(n))) ok.emplace_back(n);
    if (ok.empty()) throw UnsatisfiableConstraint("no asset fits the task");
    return ok[r.index(ok.size())];
  };
  auto open_surface = [](const AssetSpec& a) { return a.is_receptacle && !a.is_openable && !a.is_grabbable; };
  const std::string kind =
      hints.room_kind.value_or(std::string(kKinds[r.index(kKinds.size())]));

  std::vector<PlacementConstraint> cons;
  std::string a_name, b_name;
  switch (tmpl) {
    case TaskTemplate::come_here: break;
    case TaskTemplate::go_to:
      a_name = hints.object.value_or(pick(furniture_for(kind), [](const AssetSpec&) { return true; }));
      cons.push_back({a_name, std::nullopt, kind});
      break;
    case TaskTemplate::pick_up:
    case TaskTemplate::bring_me:
    case TaskTemplate::where_is:
    case TaskTemplate::put_on: {
      const std::string rec = hints.receptacle.value_or(pick(furniture_for(kind), open_surface));
      a_name = hints.object.value_or(pick(small_objects_for(kind), [](const AssetSpec& a) { return a.is_grabbable; }));
      cons.push_back({a_name, rec, kind});
      if (tmpl == TaskTemplate::put_on) {
        std::vector<std::string_view> options;
        for (auto n : furniture_for(kind))
          if (n != rec && open_surface(catalog.at(n))) options.push_back(n);
        std::optional<std::string> kind_b = kind;
        if (options.empty()) {
          kind_b.reset();
          for (auto k : kKinds)
            for (auto n : furniture_for(k))
              if (n != rec && open_surface(catalog.at(n)) && std::find(options.begin(), options.end(), n) == options.end())
                options.push_back(n);
        }
        b_name = pick(options, open_surface);
        cons.push_back({b_name, std::nullopt, kind_b});
      }
      break;
    }
  }
  SceneSpec scene = generate_house(seed, cfg, cons, catalog);

  auto id_of = [&](const std::string& name) -> std::optional<ObjectId> {
    if (name.empty()) return std::nullopt;
    for (const auto& o : scene.objects)
      if (o.asset == name) return o.id;
    throw GenerationFailed("task binding", "object '" + name + "' missing from generated scene");
  };
  const auto a = id_of(a_name), b = id_of(b_name);
  const auto elig = eligible_bindings(tmpl, scene, catalog);
  if (std::find(elig.begin(), elig.end(), std::pair<ObjectId, ObjectId>{a.value_or(-1), b.value_or(-1)}) == elig.end())
    throw GenerationFailed("task binding", "generated bindings are not eligible for " + std::string(to_string(tmpl)));
  TaskInstance task = make_task(tmpl, scene, catalog, a, b, r.index(kPhraseVariants));
  return {std::move(scene), std::move(task)};
}

SceneSpec propose_scene_external(const std::string& prompt, ModelClient& client, const AssetCatalog& catalog) {
  std::vector<std::string> violations;
  for (int round = 0; round <= 3; ++round) {
    nlohmann::json req{{"prompt", prompt}, {"violations", violations}};
    const std::string reply = client.complete(req.dump());
    violations.clear();
    try {
      SceneSpec s = load_scene(reply);
      for (const auto& v : validate_scene(s, catalog))
        violations.push_back(std::string(to_string(v.kind)) + ": " + v.message);
      if (violations.empty()) return s;
    } catch (const ParseError& e) {
      violations.push_back(std::string("parse error: ") + e.what());
    }
  }
  throw StillInvalidAfterRepairs(std::move(violations));
}

}  // namespace hearth
