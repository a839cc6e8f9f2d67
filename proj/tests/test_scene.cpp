#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include <hearth/procgen.hpp>
#include <hearth/scene.hpp>

#include "support.hpp"

using namespace hearth;
using hearth::test::floor_object;
using hearth::test::on_top;
using hearth::test::open_room;

namespace {

bool has_kind(const std::vector<Violation>& vs, Violation::Kind k) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.kind == k; });
}

SceneSpec sofa_scene() {
  SceneSpec s = open_room();
  const auto sofa = floor_object(4, "sofa", 3.0, 0.5);
  s.objects.push_back(sofa);
  s.objects.push_back(on_top(36, "orange", sofa, 2.5, 0.5));
  return s;
}

const AssetCatalog& cat() { return *AssetCatalog::builtin(); }

}  // namespace

TEST(Assets, BuiltinInvariants) {
  for (const auto& a : cat().assets()) {
    EXPECT_GT(a.half_extents.x, 0) << a.name;
    EXPECT_GT(a.half_extents.y, 0) << a.name;
    EXPECT_GT(a.half_extents.z, 0) << a.name;
    if (a.is_grabbable) EXPECT_LE(a.volume(), 0.125) << a.name;
  }
  EXPECT_EQ(cat().at("coffee_table").display_name(), "coffee table");
  EXPECT_THROW(cat().at("spaceship"), Error);
}

TEST(Assets, ShippedFileMatchesBuiltin) {
  const AssetCatalog shipped = AssetCatalog::load(HEARTH_SOURCE_DIR "/data/assets.json");
  EXPECT_EQ(shipped.assets(), cat().assets());
  EXPECT_EQ(AssetCatalog::parse(cat().to_json()).assets(), cat().assets());
}

TEST(Assets, RejectsBadAnnotations) {
  EXPECT_THROW(AssetCatalog({AssetSpec{"box", "x", {0, 1, 1}}}), Error);
  AssetSpec huge{"rock", "x", {1, 1, 1}};
  huge.is_grabbable = true;
  EXPECT_THROW(AssetCatalog({huge}), Error);
  EXPECT_THROW(AssetCatalog({AssetSpec{"a", "x", {1, 1, 1}}, AssetSpec{"a", "x", {1, 1, 1}}}), Error);
}

TEST(Scene, RoundTripFixture) {
  const SceneSpec s = sofa_scene();
  const std::string bytes = save_scene(s);
  const SceneSpec back = load_scene(bytes);
  EXPECT_EQ(save_scene(back), bytes);
  // Floats are written with 6 decimals.
  ASSERT_EQ(back.objects.size(), s.objects.size());
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    EXPECT_EQ(back.objects[i].id, s.objects[i].id);
    EXPECT_EQ(back.objects[i].parent_receptacle, s.objects[i].parent_receptacle);
    EXPECT_NEAR(planar_distance(back.objects[i].position, s.objects[i].position), 0.0, 1e-6);
    EXPECT_NEAR(back.objects[i].position.y, s.objects[i].position.y, 5e-7);
  }
}

TEST(Scene, RoundTripGenerated) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    ProcGenConfig cfg;
    cfg.room_count = 1 + static_cast<int>(seed % 4);
    const SceneSpec s = generate_house(seed, cfg);
    EXPECT_EQ(load_scene(save_scene(s)), s) << seed;
    EXPECT_EQ(scene_hash(load_scene(save_scene(s))), scene_hash(s));
  }
}

TEST(Scene, HashIsSixteenHexDigits) {
  const std::string h = scene_hash(sofa_scene());
  ASSERT_EQ(h.size(), 16u);
  EXPECT_TRUE(std::all_of(h.begin(), h.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); }));
  SceneSpec moved = sofa_scene();
  moved.objects[1].position.x += 0.001;
  EXPECT_NE(scene_hash(moved), h);
}

TEST(Scene, FixtureIsValid) { EXPECT_TRUE(validate_scene(sofa_scene(), cat()).empty()); }

TEST(Scene, LoadRejectsDanglingReceptacle) {
  auto j = nlohmann::json::parse(save_scene(sofa_scene()));
  j["objects"][1]["parent_receptacle"] = 99;
  try {
    load_scene(j.dump());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("dangling receptacle reference"), std::string::npos);
  }
}

TEST(Scene, LoadRejectsStructuralErrors) {
  EXPECT_THROW(load_scene("{"), ParseError);
  EXPECT_THROW(load_scene("[]"), ParseError);
  auto j = nlohmann::json::parse(save_scene(sofa_scene()));
  auto extra = j;
  extra["colour"] = "red";
  EXPECT_THROW(load_scene(extra.dump()), ParseError);
  auto missing = j;
  missing.erase("rooms");
  EXPECT_THROW(load_scene(missing.dump()), ParseError);
  auto badtype = j;
  badtype["objects"][0]["yaw"] = "north";
  EXPECT_THROW(load_scene(badtype.dump()), ParseError);
  auto bounds = j;
  bounds["rooms"][0]["bounds"] = {0, 0, 6};
  EXPECT_THROW(load_scene(bounds.dump()), ParseError);
}

TEST(Scene, ReceptacleOf) {
  const SceneSpec s = sofa_scene();
  EXPECT_EQ(receptacle_of(s, 36), std::optional<ObjectId>(4));
  EXPECT_EQ(receptacle_of(s, 4), std::nullopt);
  EXPECT_THROW(receptacle_of(s, 1234), Error);
  EXPECT_EQ(root_of(s, 36), 4);
}

TEST(Scene, DescriptionMentionsOrangeOnSofa) {
  const std::string d = describe_scene(sofa_scene(), cat());
  EXPECT_NE(d.find("Object 36 is a orange on the sofa (object 4)"), std::string::npos) << d;
}

TEST(SceneViolations, Overlap) {
  SceneSpec s = sofa_scene();
  s.objects.push_back(floor_object(5, "armchair", 3.2, 0.6));
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::overlap));
}

TEST(SceneViolations, OutsideRooms) {
  SceneSpec s = sofa_scene();
  s.objects.push_back(floor_object(5, "plant", 5.9, 3.0));
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::outside_rooms));
}

TEST(SceneViolations, DanglingAndCycles) {
  SceneSpec s = sofa_scene();
  s.objects[1].parent_receptacle = 99;
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::dangling_receptacle));

  SceneSpec c = open_room();
  const auto table = floor_object(1, "side_table", 2.0, 2.0);
  auto plate = on_top(2, "plate", table, 2.0, 2.0);
  auto plate2 = on_top(3, "plate", table, 2.0, 2.0);
  plate.parent_receptacle = 3;
  plate2.parent_receptacle = 2;
  c.objects = {table, plate, plate2};
  EXPECT_TRUE(has_kind(validate_scene(c, cat()), Violation::Kind::cyclic_receptacle));
}

TEST(SceneViolations, NotAReceptacle) {
  SceneSpec s = open_room();
  const auto chair = floor_object(1, "armchair", 2.0, 2.0);
  s.objects = {chair, on_top(2, "cup", chair, 2.0, 2.0)};
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::not_a_receptacle));
}

TEST(SceneViolations, DuplicateIdAndUnknownAsset) {
  SceneSpec s = sofa_scene();
  s.objects.push_back(floor_object(4, "plant", 1.0, 4.0));
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::duplicate_id));
  SceneSpec u = sofa_scene();
  u.objects.push_back(floor_object(8, "plant", 1.0, 4.0));
  u.objects.back().asset = "spaceship";
  EXPECT_TRUE(has_kind(validate_scene(u, cat()), Violation::Kind::unknown_asset));
}

TEST(SceneViolations, OpenState) {
  SceneSpec s = sofa_scene();
  s.objects[0].open_state = true;
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::bad_open_state));
  SceneSpec w = open_room();
  w.objects.push_back(floor_object(1, "wardrobe", 2.0, 0.4));
  w.objects.back().open_state.reset();
  EXPECT_FALSE(has_kind(validate_scene(w, cat()), Violation::Kind::bad_open_state));
}

TEST(SceneViolations, Rooms) {
  SceneSpec s = open_room();
  s.rooms.push_back({1, Rect{6, 0, 7.5, 2}, "bathroom"});
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::room_too_small));
  SceneSpec o = open_room();
  o.rooms.push_back({1, Rect{5, 0, 9, 4}, "kitchen"});
  EXPECT_TRUE(has_kind(validate_scene(o, cat()), Violation::Kind::rooms_overlap));
}

TEST(SceneViolations, Doors) {
  SceneSpec s = hearth::test::two_rooms();
  EXPECT_TRUE(validate_scene(s, cat()).empty());
  s.doors[0].center.x = 3.0;
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::door_not_on_wall));
  SceneSpec n = hearth::test::two_rooms();
  n.doors[0].width = 0.5;
  EXPECT_TRUE(has_kind(validate_scene(n, cat()), Violation::Kind::door_not_on_wall));
  SceneSpec same = hearth::test::two_rooms();
  same.doors[0].room_b = 0;
  EXPECT_TRUE(has_kind(validate_scene(same, cat()), Violation::Kind::door_not_on_wall));
}

TEST(SceneViolations, Spawn) {
  SceneSpec s = sofa_scene();
  s.agent_spawn.position = {3.0, 0.0, 0.5};
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::spawn_not_walkable));
  SceneSpec w = sofa_scene();
  w.user_spawn.position = {0.1, 0.0, 3.0};
  EXPECT_TRUE(has_kind(validate_scene(w, cat()), Violation::Kind::spawn_not_walkable));
}

TEST(SceneViolations, NonFinite) {
  SceneSpec s = sofa_scene();
  s.objects[0].position.x = std::numeric_limits<double>::quiet_NaN();
  EXPECT_TRUE(has_kind(validate_scene(s, cat()), Violation::Kind::non_finite));
}

TEST(Scene, WallPiecesLeaveDoorGap) {
  const SceneSpec s = hearth::test::two_rooms();
  for (const auto& w : wall_pieces(s)) EXPECT_FALSE(w.strictly_contains(4.0, 2.0));
  const Rect b = house_bounds(s);
  EXPECT_EQ(b, (Rect{0, 0, 8, 4}));
}

TEST(Scene, YawRotatesFootprint) {
  const auto& a = cat().at("sofa");
  ObjectInstance o = floor_object(1, "sofa", 2.0, 2.0, 90.0);
  const AABB box = world_aabb(o, a);
  EXPECT_NEAR(box.max.x - box.min.x, 0.9, 1e-9);
  EXPECT_NEAR(box.max.z - box.min.z, 2.0, 1e-9);
}
