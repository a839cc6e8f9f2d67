#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hearth/assets.hpp"
#include "hearth/geometry.hpp"

namespace hearth {

using ObjectId = int;

/// Implicit walls: every room boundary carries a wall of this thickness, centred on the
/// boundary line, with door spans removed.
inline constexpr double kWallThickness = 0.1;
inline constexpr double kWallHeight = 2.5;
inline constexpr double kMinRoomArea = 4.0;
inline constexpr double kMinDoorWidth = 0.8;
/// Body radius used when checking that spawns stand on walkable floor.
inline constexpr double kSpawnClearance = 0.25;

struct Pose {
  Vec3 position;
  double yaw = 0.0;
  bool operator==(const Pose&) const = default;
};

struct Room {
  int id = 0;
  Rect bounds;
  std::string kind;
  bool operator==(const Room&) const = default;
};

struct Door {
  int id = 0;
  int room_a = 0;
  int room_b = 0;
  Vec3 center;
  double width = 1.0;
  bool operator==(const Door&) const = default;
};

struct ObjectInstance {
  ObjectId id = 0;
  std::string asset;
  Vec3 position;  ///< box centre
  double yaw = 0.0;
  std::optional<ObjectId> parent_receptacle;
  std::optional<bool> open_state;
  bool operator==(const ObjectInstance&) const = default;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  std::vector<Room> rooms;
  std::vector<Door> doors;
  std::vector<ObjectInstance> objects;
  Pose agent_spawn;
  Pose user_spawn;

  const ObjectInstance* find_object(ObjectId id) const;
  ObjectInstance* find_object(ObjectId id);
  const Room* room_containing(double x, double z) const;

  bool operator==(const SceneSpec&) const = default;
};

struct Violation {
  enum class Kind {
    overlap,
    outside_rooms,
    dangling_receptacle,
    cyclic_receptacle,
    not_a_receptacle,
    duplicate_id,
    unknown_asset,
    bad_open_state,
    room_too_small,
    rooms_overlap,
    door_not_on_wall,
    spawn_not_walkable,
    non_finite,
  };
  Kind kind;
  std::string message;
};

std::string_view to_string(Violation::Kind k);

/// Parses the scene document. Structural problems (syntax, unknown or missing fields,
/// wrong types, dangling receptacle references) throw ParseError.
SceneSpec load_scene(std::string_view bytes);

/// Canonical serialization: fixed key order, floats with six decimals.
std::string save_scene(const SceneSpec& scene);

/// 16 hex digit FNV-1a hash of the canonical bytes.
std::string scene_hash(const SceneSpec& scene);

std::vector<Violation> validate_scene(const SceneSpec& scene, const AssetCatalog& catalog);

/// Immediate receptacle of `id`; throws hearth::Error when the id is unknown.
std::optional<ObjectId> receptacle_of(const SceneSpec& scene, ObjectId id);

std::string describe_scene(const SceneSpec& scene, const AssetCatalog& catalog);

/// World-space box of an object. Yaw that is a multiple of 90 degrees is handled exactly;
/// other yaws use the bounding box of the rotated footprint.
AABB world_aabb(const ObjectInstance& obj, const AssetSpec& asset);
AABB world_aabb(const SceneSpec& scene, const AssetCatalog& catalog, ObjectId id);

/// Wall pieces (door spans removed) as floor rectangles of kWallThickness.
std::vector<Rect> wall_pieces(const SceneSpec& scene);

/// Union bounding box of all rooms.
Rect house_bounds(const SceneSpec& scene);

/// Topmost ancestor in the receptacle chain (the object itself for floor objects).
ObjectId root_of(const SceneSpec& scene, ObjectId id);

}  // namespace hearth
