#include "hearth/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hearth/error.hpp"
#include "hearth/rng.hpp"

namespace hearth {

namespace {

using nlohmann::json;

constexpr double kEps = 1e-9;

// ---------------------------------------------------------------- serialization

std::string fixed6(double v) {
  std::string s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string vec3_text(const Vec3& v) { return "[" + fixed6(v.x) + ", " + fixed6(v.y) + ", " + fixed6(v.z) + "]"; }

std::string pose_text(const Pose& p) {
  return "{\"position\": " + vec3_text(p.position) + ", \"yaw\": " + fixed6(p.yaw) + "}";
}

template <typename T, typename F>
void write_list(std::string& out, const char* key, const std::vector<T>& items, F&& row, bool trailing_comma) {
  out += "  \"";
  out += key;
  out += "\": [";
  if (items.empty()) {
    out += "]";
  } else {
    out += "\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
      out += "    " + row(items[i]);
      out += i + 1 < items.size() ? ",\n" : "\n";
    }
    out += "  ]";
  }
  out += trailing_comma ? ",\n" : "\n";
}

// ---------------------------------------------------------------- parsing helpers

struct Reader {
  static void expect_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ParseError("expected an object", 0, 0, path);
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, _] : j.items())
      if (!allowed.contains(k)) throw ParseError("unknown field '" + k + "'", 0, 0, path.empty() ? k : path + "." + k);
    for (const char* k : keys)
      if (!j.contains(k)) throw ParseError(std::string("missing field '") + k + "'", 0, 0, path.empty() ? k : path + "." + k);
  }

  static double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError("expected a number", 0, 0, path);
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError("number must be finite", 0, 0, path);
    return v;
  }

  static std::int64_t integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError("expected an integer", 0, 0, path);
    if (j.is_number_unsigned()) {
      auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) throw ParseError("integer out of range", 0, 0, path);
      return static_cast<std::int64_t>(u);
    }
    return j.get<std::int64_t>();
  }

  static int id(const json& j, const std::string& path) {
    auto v = integer(j, path);
    if (v < 0 || v > INT32_MAX) throw ParseError("identifier must be a non-negative 32-bit integer", 0, 0, path);
    return static_cast<int>(v);
  }

  static std::uint64_t u64(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) {
      if (j.is_number_integer()) throw ParseError("expected an unsigned integer", 0, 0, path);
      throw ParseError("expected an unsigned integer", 0, 0, path);
    }
    return j.get<std::uint64_t>();
  }

  static std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError("expected a string", 0, 0, path);
    return j.get<std::string>();
  }

  static bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ParseError("expected a boolean", 0, 0, path);
    return j.get<bool>();
  }

  static std::vector<double> numbers(const json& j, const std::string& path, std::size_t n) {
    if (!j.is_array() || j.size() != n)
      throw ParseError("expected a list of " + std::to_string(n) + " numbers", 0, 0, path);
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  static Vec3 vec3(const json& j, const std::string& path) {
    auto v = numbers(j, path, 3);
    return {v[0], v[1], v[2]};
  }

  static Pose pose(const json& j, const std::string& path) {
    expect_keys(j, path, {"position", "yaw"});
    return {vec3(j["position"], path + ".position"), number(j["yaw"], path + ".yaw")};
  }

  static const json& list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError("expected a list", 0, 0, path);
    return j;
  }
};

std::pair<int, int> line_col(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// ---------------------------------------------------------------- geometry helpers

bool is_right_angle(double yaw) {
  double r = std::fmod(std::fabs(yaw), 90.0);
  return r < 1e-9 || 90.0 - r < 1e-9;
}

struct Side {
  bool horizontal;  // constant z (true) or constant x (false)
  double line;      // the constant coordinate
  double lo, hi;    // extent along the other axis
};

std::array<Side, 4> sides_of(const Rect& r) {
  return {Side{true, r.min_z, r.min_x, r.max_x}, Side{true, r.max_z, r.min_x, r.max_x},
          Side{false, r.min_x, r.min_z, r.max_z}, Side{false, r.max_x, r.min_z, r.max_z}};
}

bool door_on_side(const Door& d, const Side& s, double eps = 1e-6) {
  double across = s.horizontal ? d.center.z : d.center.x;
  double along = s.horizontal ? d.center.x : d.center.z;
  return std::fabs(across - s.line) < eps && along >= s.lo - eps && along <= s.hi + eps;
}

std::string quadrant_of(const Room& room, const Vec3& p) {
  const Vec3 c = room.bounds.center();
  std::string ns = p.z >= c.z ? "north" : "south";
  std::string ew = p.x >= c.x ? "east" : "west";
  return ns + "-" + ew;
}

}  // namespace

// ---------------------------------------------------------------- SceneSpec

const ObjectInstance* SceneSpec::find_object(ObjectId id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

ObjectInstance* SceneSpec::find_object(ObjectId id) {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const Room* SceneSpec::room_containing(double x, double z) const {
  for (const auto& r : rooms)
    if (r.bounds.contains(x, z)) return &r;
  return nullptr;
}

std::string_view to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::overlap: return "overlap";
    case Violation::Kind::outside_rooms: return "outside_rooms";
    case Violation::Kind::dangling_receptacle: return "dangling_receptacle";
    case Violation::Kind::cyclic_receptacle: return "cyclic_receptacle";
    case Violation::Kind::not_a_receptacle: return "not_a_receptacle";
    case Violation::Kind::duplicate_id: return "duplicate_id";
    case Violation::Kind::unknown_asset: return "unknown_asset";
    case Violation::Kind::bad_open_state: return "bad_open_state";
    case Violation::Kind::room_too_small: return "room_too_small";
    case Violation::Kind::rooms_overlap: return "rooms_overlap";
    case Violation::Kind::door_not_on_wall: return "door_not_on_wall";
    case Violation::Kind::spawn_not_walkable: return "spawn_not_walkable";
    case Violation::Kind::non_finite: return "non_finite";
  }
  return "unknown";
}

// ---------------------------------------------------------------- load / save

SceneSpec load_scene(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(bytes, e.byte);
    throw ParseError("scene is not valid JSON", line, col);
  }

  using R = Reader;
  R::expect_keys(doc, "", {"seed", "rooms", "doors", "objects", "agent_spawn", "user_spawn"});

  SceneSpec s;
  s.seed = R::u64(doc["seed"], "seed");

  const auto& rooms = R::list(doc["rooms"], "rooms");
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    const std::string p = "rooms[" + std::to_string(i) + "]";
    R::expect_keys(rooms[i], p, {"id", "bounds", "kind"});
    Room r;
    r.id = R::id(rooms[i]["id"], p + ".id");
    auto b = R::numbers(rooms[i]["bounds"], p + ".bounds", 4);
    r.bounds = {b[0], b[1], b[2], b[3]};
    if (!(r.bounds.min_x <= r.bounds.max_x && r.bounds.min_z <= r.bounds.max_z))
      throw ParseError("bounds must be [min_x, min_z, max_x, max_z]", 0, 0, p + ".bounds");
    r.kind = R::string(rooms[i]["kind"], p + ".kind");
    s.rooms.push_back(std::move(r));
  }

  const auto& doors = R::list(doc["doors"], "doors");
  for (std::size_t i = 0; i < doors.size(); ++i) {
    const std::string p = "doors[" + std::to_string(i) + "]";
    R::expect_keys(doors[i], p, {"id", "room_a", "room_b", "center", "width"});
    Door d;
    d.id = R::id(doors[i]["id"], p + ".id");
    d.room_a = R::id(doors[i]["room_a"], p + ".room_a");
    d.room_b = R::id(doors[i]["room_b"], p + ".room_b");
    d.center = R::vec3(doors[i]["center"], p + ".center");
    d.width = R::number(doors[i]["width"], p + ".width");
    s.doors.push_back(d);
  }

  const auto& objects = R::list(doc["objects"], "objects");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string p = "objects[" + std::to_string(i) + "]";
    const auto& o = objects[i];
    R::expect_keys(o, p, {"id", "asset", "position", "yaw", "parent_receptacle", "open_state"});
    ObjectInstance obj;
    obj.id = R::id(o["id"], p + ".id");
    obj.asset = R::string(o["asset"], p + ".asset");
    obj.position = R::vec3(o["position"], p + ".position");
    obj.yaw = R::number(o["yaw"], p + ".yaw");
    if (!o["parent_receptacle"].is_null()) obj.parent_receptacle = R::id(o["parent_receptacle"], p + ".parent_receptacle");
    if (!o["open_state"].is_null()) obj.open_state = R::boolean(o["open_state"], p + ".open_state");
    s.objects.push_back(std::move(obj));
  }

  s.agent_spawn = R::pose(doc["agent_spawn"], "agent_spawn");
  s.user_spawn = R::pose(doc["user_spawn"], "user_spawn");

  std::unordered_set<ObjectId> ids;
  for (const auto& o : s.objects) ids.insert(o.id);
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const auto& o = s.objects[i];
    if (o.parent_receptacle && !ids.contains(*o.parent_receptacle))
      throw ParseError("dangling receptacle reference " + std::to_string(*o.parent_receptacle), 0, 0,
                       "objects[" + std::to_string(i) + "].parent_receptacle");
  }
  return s;
}

std::string save_scene(const SceneSpec& s) {
  std::string out = "{\n";
  out += "  \"seed\": " + std::to_string(s.seed) + ",\n";
  write_list(out, "rooms", s.rooms, [](const Room& r) {
    return "{\"id\": " + std::to_string(r.id) + ", \"bounds\": [" + fixed6(r.bounds.min_x) + ", " +
           fixed6(r.bounds.min_z) + ", " + fixed6(r.bounds.max_x) + ", " + fixed6(r.bounds.max_z) +
           "], \"kind\": " + quoted(r.kind) + "}";
  }, true);
  write_list(out, "doors", s.doors, [](const Door& d) {
    return "{\"id\": " + std::to_string(d.id) + ", \"room_a\": " + std::to_string(d.room_a) +
           ", \"room_b\": " + std::to_string(d.room_b) + ", \"center\": " + vec3_text(d.center) +
           ", \"width\": " + fixed6(d.width) + "}";
  }, true);
  write_list(out, "objects", s.objects, [](const ObjectInstance& o) {
    std::string parent = o.parent_receptacle ? std::to_string(*o.parent_receptacle) : "null";
    std::string open = o.open_state ? (*o.open_state ? "true" : "false") : "null";
    return "{\"id\": " + std::to_string(o.id) + ", \"asset\": " + quoted(o.asset) + ", \"position\": " +
           vec3_text(o.position) + ", \"yaw\": " + fixed6(o.yaw) + ", \"parent_receptacle\": " + parent +
           ", \"open_state\": " + open + "}";
  }, true);
  out += "  \"agent_spawn\": " + pose_text(s.agent_spawn) + ",\n";
  out += "  \"user_spawn\": " + pose_text(s.user_spawn) + "\n";
  out += "}\n";
  return out;
}

std::string scene_hash(const SceneSpec& scene) { return fmt::format("{:016x}", Rng::fnv1a(save_scene(scene))); }

// ---------------------------------------------------------------- geometry

AABB world_aabb(const ObjectInstance& obj, const AssetSpec& asset) {
  double hx = asset.half_extents.x, hz = asset.half_extents.z;
  double ex, ez;
  if (is_right_angle(obj.yaw)) {
    long quarter = std::lround(obj.yaw / 90.0);
    bool swap = (quarter % 2) != 0;
    ex = swap ? hz : hx;
    ez = swap ? hx : hz;
  } else {
    double r = deg_to_rad(obj.yaw);
    double c = std::fabs(std::cos(r)), sn = std::fabs(std::sin(r));
    ex = c * hx + sn * hz;
    ez = sn * hx + c * hz;
  }
  const Vec3 he{ex, asset.half_extents.y, ez};
  return {obj.position - he, obj.position + he};
}

AABB world_aabb(const SceneSpec& scene, const AssetCatalog& catalog, ObjectId id) {
  const auto* o = scene.find_object(id);
  if (!o) throw Error("unknown object id " + std::to_string(id));
  return world_aabb(*o, catalog.at(o->asset));
}

std::vector<Rect> wall_pieces(const SceneSpec& scene) {
  constexpr double half = kWallThickness / 2;
  std::vector<Rect> out;
  for (const auto& room : scene.rooms) {
    for (const auto& side : sides_of(room.bounds)) {
      std::vector<std::pair<double, double>> gaps;
      for (const auto& d : scene.doors) {
        if (!door_on_side(d, side)) continue;
        double along = side.horizontal ? d.center.x : d.center.z;
        gaps.emplace_back(along - d.width / 2, along + d.width / 2);
      }
      std::sort(gaps.begin(), gaps.end());
      double cursor = side.lo;
      auto emit = [&](double a, double b) {
        if (b - a <= 1e-9) return;
        if (side.horizontal)
          out.push_back({a, side.line - half, b, side.line + half});
        else
          out.push_back({side.line - half, a, side.line + half, b});
      };
      for (const auto& [g0, g1] : gaps) {
        emit(cursor, std::min(g0, side.hi));
        cursor = std::max(cursor, g1);
      }
      emit(cursor, side.hi);
    }
  }
  return out;
}

Rect house_bounds(const SceneSpec& scene) {
  if (scene.rooms.empty()) return {};
  Rect r = scene.rooms.front().bounds;
  for (const auto& room : scene.rooms) {
    r.min_x = std::min(r.min_x, room.bounds.min_x);
    r.min_z = std::min(r.min_z, room.bounds.min_z);
    r.max_x = std::max(r.max_x, room.bounds.max_x);
    r.max_z = std::max(r.max_z, room.bounds.max_z);
  }
  return r;
}

ObjectId root_of(const SceneSpec& scene, ObjectId id) {
  ObjectId cur = id;
  for (std::size_t guard = 0; guard <= scene.objects.size(); ++guard) {
    const auto* o = scene.find_object(cur);
    if (!o || !o->parent_receptacle) return cur;
    cur = *o->parent_receptacle;
  }
  return cur;
}

// ---------------------------------------------------------------- validation

std::vector<Violation> validate_scene(const SceneSpec& s, const AssetCatalog& catalog) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  auto add = [&](K k, std::string msg) { out.push_back({k, std::move(msg)}); };

  // Rooms.
  for (std::size_t i = 0; i < s.rooms.size(); ++i) {
    const auto& r = s.rooms[i];
    if (r.bounds.area() < kMinRoomArea - kEps)
      add(K::room_too_small, fmt::format("room {} has area {:.3f} m^2 (< {:.1f})", r.id, r.bounds.area(), kMinRoomArea));
    for (std::size_t j = i + 1; j < s.rooms.size(); ++j)
      if (r.bounds.overlaps(s.rooms[j].bounds, 1e-6))
        add(K::rooms_overlap, fmt::format("rooms {} and {} overlap", r.id, s.rooms[j].id));
  }

  // Object bookkeeping.
  std::unordered_map<ObjectId, const ObjectInstance*> by_id;
  std::unordered_map<ObjectId, const AssetSpec*> asset_of;
  for (const auto& o : s.objects) {
    if (!by_id.emplace(o.id, &o).second) add(K::duplicate_id, fmt::format("object id {} is used twice", o.id));
    if (!o.position.finite() || !std::isfinite(o.yaw)) add(K::non_finite, fmt::format("object {} has a non-finite pose", o.id));
    const auto* a = catalog.find(o.asset);
    if (!a) {
      add(K::unknown_asset, fmt::format("object {} uses unknown asset '{}'", o.id, o.asset));
      continue;
    }
    asset_of[o.id] = a;
    if (o.open_state && !a->is_openable)
      add(K::bad_open_state, fmt::format("object {} ({}) is not openable but has an open state", o.id, o.asset));
  }

  // Receptacle graph.
  std::unordered_set<ObjectId> broken;
  for (const auto& o : s.objects) {
    if (!o.parent_receptacle) continue;
    auto it = by_id.find(*o.parent_receptacle);
    if (it == by_id.end()) {
      add(K::dangling_receptacle, fmt::format("object {} references missing receptacle {}", o.id, *o.parent_receptacle));
      broken.insert(o.id);
      continue;
    }
    auto at = asset_of.find(*o.parent_receptacle);
    if (at != asset_of.end() && !at->second->is_receptacle)
      add(K::not_a_receptacle, fmt::format("object {} rests on {} which is not a receptacle", o.id, *o.parent_receptacle));
  }
  for (const auto& o : s.objects) {
    std::unordered_set<ObjectId> seen{o.id};
    const ObjectInstance* cur = &o;
    while (cur->parent_receptacle) {
      auto it = by_id.find(*cur->parent_receptacle);
      if (it == by_id.end()) break;
      if (!seen.insert(it->first).second) {
        add(K::cyclic_receptacle, fmt::format("receptacle chain of object {} is cyclic", o.id));
        broken.insert(o.id);
        break;
      }
      cur = it->second;
    }
  }

  // Placement inside rooms.
  constexpr double inset = kWallThickness / 2;
  std::unordered_map<ObjectId, AABB> box;
  for (const auto& o : s.objects) {
    auto at = asset_of.find(o.id);
    if (at == asset_of.end()) continue;
    box[o.id] = world_aabb(o, *at->second);
  }
  for (const auto& o : s.objects) {
    auto b = box.find(o.id);
    if (b == box.end()) continue;
    Rect fp = b->second.footprint();
    bool inside = std::any_of(s.rooms.begin(), s.rooms.end(),
                              [&](const Room& r) { return r.bounds.inflated(-inset).contains(fp); });
    if (!inside) add(K::outside_rooms, fmt::format("object {} ({}) is not inside any room", o.id, o.asset));
  }

  // Overlaps: floor-level objects against each other, siblings against each other.
  std::map<std::optional<ObjectId>, std::vector<ObjectId>> groups;
  for (const auto& o : s.objects)
    if (box.contains(o.id) && !broken.contains(o.id)) groups[o.parent_receptacle].push_back(o.id);
  for (const auto& [parent, members] : groups) {
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        if (box[members[i]].overlaps(box[members[j]]))
          add(K::overlap, fmt::format("objects {} and {} overlap", members[i], members[j]));
  }

  // Doors.
  std::unordered_map<int, const Room*> room_by_id;
  for (const auto& r : s.rooms) room_by_id[r.id] = &r;
  for (const auto& d : s.doors) {
    auto a = room_by_id.find(d.room_a), b = room_by_id.find(d.room_b);
    if (d.room_a == d.room_b || a == room_by_id.end() || b == room_by_id.end()) {
      add(K::door_not_on_wall, fmt::format("door {} must connect two distinct existing rooms", d.id));
      continue;
    }
    if (d.width < kMinDoorWidth - kEps) {
      add(K::door_not_on_wall, fmt::format("door {} is narrower than {:.1f} m", d.id, kMinDoorWidth));
      continue;
    }
    bool ok = false;
    for (const auto& sa : sides_of(a->second->bounds)) {
      if (!door_on_side(d, sa)) continue;
      for (const auto& sb : sides_of(b->second->bounds)) {
        if (sb.horizontal != sa.horizontal || std::fabs(sb.line - sa.line) > 1e-6) continue;
        double lo = std::max(sa.lo, sb.lo), hi = std::min(sa.hi, sb.hi);
        double along = sa.horizontal ? d.center.x : d.center.z;
        if (along - d.width / 2 >= lo - 1e-6 && along + d.width / 2 <= hi + 1e-6) ok = true;
      }
    }
    if (!ok) add(K::door_not_on_wall, fmt::format("door {} does not lie on a wall shared by rooms {} and {}", d.id, d.room_a, d.room_b));
  }

  // Spawns.
  auto walls = wall_pieces(s);
  auto walkable = [&](const Pose& p) {
    const double x = p.position.x, z = p.position.z;
    if (!p.position.finite()) return false;
    bool in_room = std::any_of(s.rooms.begin(), s.rooms.end(), [&](const Room& r) {
      return r.bounds.inflated(-(inset + kSpawnClearance)).contains(x, z);
    });
    if (!in_room) return false;
    for (const auto& w : walls)
      if (w.inflated(kSpawnClearance).strictly_contains(x, z)) return false;
    for (const auto& o : s.objects) {
      if (o.parent_receptacle || !box.contains(o.id)) continue;
      if (box[o.id].footprint().inflated(kSpawnClearance).strictly_contains(x, z)) return false;
    }
    return true;
  };
  if (!walkable(s.agent_spawn)) add(K::spawn_not_walkable, "agent spawn is not on walkable floor");
  if (!walkable(s.user_spawn)) add(K::spawn_not_walkable, "user spawn is not on walkable floor");

  return out;
}

std::optional<ObjectId> receptacle_of(const SceneSpec& scene, ObjectId id) {
  const auto* o = scene.find_object(id);
  if (!o) throw Error("unknown object id " + std::to_string(id));
  return o->parent_receptacle;
}

// ---------------------------------------------------------------- description

std::string describe_scene(const SceneSpec& s, const AssetCatalog& catalog) {
  auto name_of = [&](const ObjectInstance& o) {
    const auto* a = catalog.find(o.asset);
    return a ? a->display_name() : o.asset;
  };
  std::string out = fmt::format("The house has {} room(s), {} door(s) and {} object(s).\n", s.rooms.size(),
                                s.doors.size(), s.objects.size());
  for (const auto& room : s.rooms) {
    out += fmt::format("Room {} ({}) spans x {:.2f} to {:.2f} and z {:.2f} to {:.2f}.\n", room.id, room.kind,
                       room.bounds.min_x, room.bounds.max_x, room.bounds.min_z, room.bounds.max_z);
    for (const auto& o : s.objects) {
      const ObjectInstance* anchor = s.find_object(root_of(s, o.id));
      if (!anchor) anchor = &o;
      const Room* home = s.room_containing(anchor->position.x, anchor->position.z);
      if (home != &room) continue;
      std::string support = "on the floor";
      if (o.parent_receptacle) {
        const auto* p = s.find_object(*o.parent_receptacle);
        support = fmt::format("on the {} (object {})", p ? name_of(*p) : "?", *o.parent_receptacle);
      }
      std::string state;
      if (o.open_state) state = *o.open_state ? ", open" : ", closed";
      out += fmt::format("  Object {} is a {} {}, in the {} part of the room{}.\n", o.id, name_of(o), support,
                         quadrant_of(room, o.position), state);
    }
  }
  for (const auto& d : s.doors)
    out += fmt::format("Door {} connects room {} and room {} at ({:.2f}, {:.2f}).\n", d.id, d.room_a, d.room_b,
                       d.center.x, d.center.z);
  out += fmt::format("The agent stands at ({:.2f}, {:.2f}); the user stands at ({:.2f}, {:.2f}).\n",
                     s.agent_spawn.position.x, s.agent_spawn.position.z, s.user_spawn.position.x,
                     s.user_spawn.position.z);
  return out;
}

}  // namespace hearth
