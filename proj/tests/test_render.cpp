#include <gtest/gtest.h>

#include <set>

#include <hearth/render.hpp>

#include "support.hpp"

using namespace hearth;
using namespace hearth::test;

namespace {

/// Builtin catalog plus thin test panels.
std::shared_ptr<const AssetCatalog> panel_catalog() {
  auto assets = AssetCatalog::builtin()->assets();
  assets.push_back(AssetSpec{"panel", "test", {0.25, 0.25, 0.01}, false, false, false, Placement::floor, {200, 0, 0}});
  assets.push_back(AssetSpec{"big_panel", "test", {0.6, 0.6, 0.01}, false, false, false, Placement::floor, {0, 0, 200}});
  return std::make_shared<const AssetCatalog>(std::move(assets));
}

ObjectInstance panel(ObjectId id, const std::string& asset, double x, double z, double half_y) {
  ObjectInstance o;
  o.id = id;
  o.asset = asset;
  o.position = {x, half_y, z};
  return o;
}

struct Block {
  int rows = 0;
  int cols = 0;
  double row_mid = 0;
  double col_mid = 0;
};

Block block_of(const std::vector<std::int32_t>& ids, int w, int h, ObjectId id) {
  int r0 = h, r1 = -1, c0 = w, c1 = -1;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (ids[r * w + c] == id) {
        r0 = std::min(r0, r);
        r1 = std::max(r1, r);
        c0 = std::min(c0, c);
        c1 = std::max(c1, c);
      }
  if (r1 < 0) return {};
  return {r1 - r0 + 1, c1 - c0 + 1, (r0 + r1 + 1) / 2.0, (c0 + c1 + 1) / 2.0};
}

}  // namespace

TEST(Render, CameraValidation) {
  CameraConfig c;
  EXPECT_NO_THROW(c.validate());
  c.width = 8;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.horizontal_fov = 150;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NEAR(CameraConfig{}.focal(), 128.0, 1e-9);
}

TEST(Render, BuffersExactlySized) {
  const SceneSpec s = open_room();
  EnvState st = reset(s, AssetCatalog::builtin());
  CameraConfig cam;
  cam.width = 96;
  cam.height = 48;
  const Frame f = render_egocentric(st, cam);
  EXPECT_EQ(f.width, 96);
  EXPECT_EQ(f.height, 48);
  EXPECT_EQ(f.rgb.size(), 96u * 48u * 3u);
  EXPECT_EQ(f.instance.size(), 96u * 48u);
}

TEST(Render, ProjectedSizeMatchesPinhole) {
  // Thin 0.5 m panel centred 2 m ahead at eye height.
  auto cat = panel_catalog();
  SceneSpec s = open_room(8, 8);
  s.objects.push_back(panel(1, "panel", 4.0, 4.0, 0.25));
  s.agent_spawn = {{4.0, 0.0, 2.0}, 0.0};
  EnvState st = reset(s, cat);
  CameraConfig cam;
  cam.eye_height = 0.25;
  const Frame f = render_egocentric(st, cam);
  const Block b = block_of(f.instance, f.width, f.height, 1);
  const double depth = 2.0 - 0.01;
  const double want = 0.5 * cam.focal() / depth;
  EXPECT_NEAR(b.rows, want, 2.0);
  EXPECT_NEAR(b.cols, want, 2.0);
  EXPECT_NEAR(b.row_mid, cam.height / 2.0, 1.0);
  EXPECT_NEAR(b.col_mid, cam.width / 2.0, 1.0);
}

TEST(Render, SizeScalesInverselyWithDepth) {
  auto cat = panel_catalog();
  CameraConfig cam;
  cam.eye_height = 0.25;
  int last = 1 << 30;
  for (double d : {1.5, 2.0, 3.0, 4.0}) {
    SceneSpec s = open_room(8, 8);
    s.objects.push_back(panel(1, "panel", 4.0, 1.0 + d, 0.25));
    s.agent_spawn = {{4.0, 0.0, 1.0}, 0.0};
    EnvState st = reset(s, cat);
    const Block b = block_of(render_instances(st, cam), cam.width, cam.height, 1);
    EXPECT_NEAR(b.rows, 0.5 * cam.focal() / (d - 0.01), 2.0) << d;
    EXPECT_LT(b.rows, last);
    last = b.rows;
  }
}

TEST(Render, NearerBoxWinsThePixel) {
  auto cat = panel_catalog();
  SceneSpec s = open_room(8, 8);
  s.objects.push_back(panel(1, "panel", 4.0, 3.0, 0.25));
  s.objects.push_back(panel(2, "big_panel", 4.0, 5.0, 0.6));
  s.agent_spawn = {{4.0, 0.0, 1.0}, 0.0};
  EnvState st = reset(s, cat);
  CameraConfig cam;
  cam.eye_height = 0.25;
  const auto ids = render_instances(st, cam);
  EXPECT_EQ(ids[(cam.height / 2) * cam.width + cam.width / 2], 1);
  EXPECT_GT(block_of(ids, cam.width, cam.height, 2).rows, 0);
  // Swap the order in the object list: the result must not change.
  std::swap(s.objects[0], s.objects[1]);
  EnvState st2 = reset(s, cat);
  EXPECT_EQ(render_instances(st2, cam), ids);
}

TEST(Render, SentinelsAndLiveIds) {
  SceneSpec s = open_room();
  const auto sofa = floor_object(4, "sofa", 3.0, 0.5);
  s.objects.push_back(sofa);
  s.objects.push_back(on_top(36, "orange", sofa, 2.5, 0.5));
  s.agent_spawn = {{3.0, 0.0, 3.0}, 180.0};
  EnvState st = reset(s, AssetCatalog::builtin());
  const Frame f = render_egocentric(st);
  std::set<std::int32_t> seen(f.instance.begin(), f.instance.end());
  EXPECT_TRUE(seen.contains(kFloorId));
  EXPECT_TRUE(seen.contains(kWallId));
  EXPECT_TRUE(seen.contains(4));
  for (auto v : seen) EXPECT_TRUE(v == kFloorId || v == kWallId || v == kBackgroundId || st.scene.find_object(v));
  // Looking up at the open sky above the walls.
  step(st, RotateUp{60});
  const auto up = render_instances(st, CameraConfig{});
  EXPECT_EQ(up[0], kBackgroundId);
}

TEST(Render, VisibleOccludedAndBehind) {
  auto cat = panel_catalog();
  SceneSpec s = open_room(8, 8);
  s.objects.push_back(panel(1, "panel", 4.0, 5.0, 0.25));
  s.objects.push_back(panel(2, "big_panel", 4.0, 3.0, 0.6));
  s.agent_spawn = {{4.0, 0.0, 1.0}, 0.0};
  EnvState st = reset(s, cat);
  CameraConfig cam;
  cam.eye_height = 0.6;
  EXPECT_FALSE(visible(st, 1, cam));
  EXPECT_TRUE(visible(st, 2, cam));

  s.objects.pop_back();
  EnvState open = reset(s, cat);
  EXPECT_TRUE(visible(open, 1, cam));
  step(open, RotateRight{180});
  EXPECT_FALSE(visible(open, 1, cam));
}

TEST(Render, VisibleRangeLimit) {
  auto cat = panel_catalog();
  SceneSpec s = open_room(4, 16);
  s.objects.push_back(panel(1, "big_panel", 2.0, 14.5, 0.6));
  s.agent_spawn = {{2.0, 0.0, 1.0}, 0.0};
  EnvState st = reset(s, cat);
  EXPECT_FALSE(visible(st, 1));
  st.agent.position.z = 6.0;
  EXPECT_TRUE(visible(st, 1));
}

TEST(Render, PngRoundTrip) {
  SceneSpec s = open_room();
  const auto sofa = floor_object(4, "sofa", 3.0, 0.5);
  s.objects.push_back(sofa);
  s.agent_spawn = {{3.0, 0.0, 3.0}, 180.0};
  EnvState st = reset(s, AssetCatalog::builtin());
  const Frame f = render_egocentric(st);
  const std::string png = encode_png(f);
  EXPECT_EQ(png.substr(1, 3), "PNG");
  const DecodedImage d = decode_png(png);
  EXPECT_EQ(d.width, f.width);
  EXPECT_EQ(d.height, f.height);
  EXPECT_EQ(d.channels, 3);
  EXPECT_EQ(d.bit_depth, 8);
  EXPECT_EQ(d.pixels, f.rgb);
  EXPECT_EQ(encode_png(f), png);

  const DecodedImage inst = decode_png(encode_instance_png(f));
  EXPECT_EQ(inst.bit_depth, 16);
  EXPECT_EQ(inst.channels, 1);
  for (std::size_t i = 0; i < f.instance.size(); ++i) {
    const int v = (inst.pixels[2 * i] << 8) | inst.pixels[2 * i + 1];
    ASSERT_EQ(v, f.instance[i] + 3);
  }
  EXPECT_THROW(decode_png(std::string("not a png")), Error);
}

TEST(Render, Deterministic) {
  const SceneSpec s = hearth::test::two_rooms();
  EnvState a = reset(s, AssetCatalog::builtin());
  EnvState b = reset(s, AssetCatalog::builtin());
  EXPECT_EQ(render_egocentric(a), render_egocentric(b));
}
