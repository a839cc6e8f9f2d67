#include "hearth/assets.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hearth/error.hpp"

namespace hearth {

namespace {

using nlohmann::json;

AssetSpec floor_asset(std::string name, std::string category, Vec3 he, bool receptacle, bool openable, Rgb c) {
  return AssetSpec{std::move(name), std::move(category), he, receptacle, false, openable, Placement::floor, c};
}

AssetSpec small_asset(std::string name, std::string category, Vec3 he, Rgb c, bool receptacle = false) {
  return AssetSpec{std::move(name), std::move(category), he, receptacle, true, false, Placement::surface, c};
}

std::vector<AssetSpec> builtin_assets() {
  return {
      // Large furniture.
      floor_asset("sofa", "seating", {1.0, 0.4, 0.45}, true, false, {128, 64, 52}),
      floor_asset("armchair", "seating", {0.45, 0.4, 0.45}, false, false, {150, 90, 60}),
      floor_asset("chair", "seating", {0.25, 0.45, 0.25}, false, false, {140, 100, 70}),
      floor_asset("coffee_table", "table", {0.6, 0.225, 0.35}, true, false, {160, 120, 80}),
      floor_asset("dining_table", "table", {0.8, 0.375, 0.5}, true, false, {170, 125, 75}),
      floor_asset("side_table", "table", {0.3, 0.3, 0.3}, true, false, {150, 110, 70}),
      floor_asset("desk", "table", {0.6, 0.375, 0.35}, true, false, {120, 90, 60}),
      floor_asset("kitchen_counter", "table", {0.9, 0.45, 0.3}, true, false, {200, 200, 205}),
      floor_asset("tv_stand", "storage", {0.8, 0.25, 0.25}, true, false, {60, 60, 65}),
      floor_asset("bookshelf", "storage", {0.45, 0.6, 0.2}, true, false, {110, 80, 50}),
      floor_asset("drawer", "storage", {0.3, 0.35, 0.25}, true, true, {180, 150, 110}),
      floor_asset("cabinet", "storage", {0.4, 0.45, 0.25}, true, true, {190, 170, 140}),
      floor_asset("wardrobe", "storage", {0.6, 1.0, 0.3}, true, true, {100, 70, 45}),
      floor_asset("bed", "bed", {0.8, 0.25, 1.0}, true, false, {90, 110, 170}),
      floor_asset("fridge", "appliance", {0.4, 0.9, 0.35}, true, true, {225, 228, 232}),
      floor_asset("bathtub", "bath", {0.8, 0.3, 0.4}, false, false, {240, 240, 245}),
      floor_asset("toilet", "bath", {0.2, 0.4, 0.3}, false, false, {235, 235, 240}),
      floor_asset("sink_cabinet", "bath", {0.4, 0.425, 0.25}, true, false, {210, 215, 220}),
      floor_asset("floor_lamp", "lighting", {0.2, 0.8, 0.2}, false, false, {230, 210, 120}),
      floor_asset("plant", "plant", {0.25, 0.5, 0.25}, false, false, {50, 140, 60}),
      // Small grabbable objects.
      small_asset("orange", "fruit", {0.04, 0.04, 0.04}, {245, 140, 20}),
      small_asset("apple", "fruit", {0.04, 0.04, 0.04}, {200, 30, 30}),
      small_asset("banana", "fruit", {0.1, 0.025, 0.04}, {240, 220, 60}),
      small_asset("cup", "kitchenware", {0.04, 0.05, 0.04}, {240, 240, 250}),
      small_asset("mug", "kitchenware", {0.05, 0.05, 0.05}, {70, 120, 200}),
      small_asset("plate", "kitchenware", {0.12, 0.01, 0.12}, {250, 250, 250}, true),
      small_asset("bowl", "kitchenware", {0.08, 0.04, 0.08}, {220, 200, 170}),
      small_asset("bottle", "kitchenware", {0.04, 0.12, 0.04}, {60, 170, 90}),
      small_asset("book", "book", {0.1, 0.02, 0.14}, {150, 30, 60}),
      small_asset("remote", "electronics", {0.03, 0.01, 0.09}, {30, 30, 30}),
      small_asset("phone", "electronics", {0.04, 0.005, 0.08}, {20, 20, 25}),
      small_asset("laptop", "electronics", {0.17, 0.01, 0.12}, {120, 125, 130}),
      small_asset("vase", "decor", {0.06, 0.12, 0.06}, {80, 160, 180}),
      small_asset("candle", "decor", {0.03, 0.05, 0.03}, {250, 240, 220}),
      small_asset("toy_car", "toy", {0.06, 0.04, 0.1}, {220, 40, 40}),
      small_asset("teddy_bear", "toy", {0.1, 0.12, 0.08}, {160, 110, 60}),
      small_asset("keys", "accessory", {0.03, 0.01, 0.03}, {200, 190, 120}),
      small_asset("pillow", "textile", {0.2, 0.06, 0.15}, {230, 200, 210}),
      small_asset("towel", "textile", {0.15, 0.03, 0.1}, {120, 200, 220}),
      small_asset("soap", "bath", {0.04, 0.02, 0.03}, {250, 200, 220}),
  };
}

std::string_view placement_name(Placement p) { return p == Placement::floor ? "floor" : "surface"; }

json asset_to_json(const AssetSpec& a) {
  json j = json::object();
  j["name"] = a.name;
  j["category"] = a.category;
  j["half_extents"] = {a.half_extents.x, a.half_extents.y, a.half_extents.z};
  j["is_receptacle"] = a.is_receptacle;
  j["is_grabbable"] = a.is_grabbable;
  j["is_openable"] = a.is_openable;
  j["placement"] = placement_name(a.placement);
  j["color"] = {a.color.r, a.color.g, a.color.b};
  return j;
}

AssetSpec asset_from_json(const json& j, std::size_t idx) {
  const std::string where = "assets[" + std::to_string(idx) + "]";
  static const std::set<std::string> keys{"name",       "category",     "half_extents", "is_receptacle",
                                          "is_grabbable", "is_openable", "placement",    "color"};
  if (!j.is_object()) throw ParseError("asset entry must be an object", 0, 0, where);
  for (const auto& [k, _] : j.items())
    if (!keys.contains(k)) throw ParseError("unknown field '" + k + "'", 0, 0, where + "." + k);
  for (const auto& k : keys)
    if (!j.contains(k)) throw ParseError("missing field '" + k + "'", 0, 0, where + "." + k);
  try {
    AssetSpec a;
    a.name = j.at("name").get<std::string>();
    a.category = j.at("category").get<std::string>();
    const auto& he = j.at("half_extents");
    if (!he.is_array() || he.size() != 3) throw ParseError("half_extents must be [x, y, z]", 0, 0, where + ".half_extents");
    a.half_extents = {he[0].get<double>(), he[1].get<double>(), he[2].get<double>()};
    a.is_receptacle = j.at("is_receptacle").get<bool>();
    a.is_grabbable = j.at("is_grabbable").get<bool>();
    a.is_openable = j.at("is_openable").get<bool>();
    const auto p = j.at("placement").get<std::string>();
    if (p == "floor")
      a.placement = Placement::floor;
    else if (p == "surface")
      a.placement = Placement::surface;
    else
      throw ParseError("placement must be 'floor' or 'surface'", 0, 0, where + ".placement");
    const auto& c = j.at("color");
    if (!c.is_array() || c.size() != 3) throw ParseError("color must be [r, g, b]", 0, 0, where + ".color");
    a.color = {c[0].get<std::uint8_t>(), c[1].get<std::uint8_t>(), c[2].get<std::uint8_t>()};
    return a;
  } catch (const json::exception& e) {
    throw ParseError(std::string("type error: ") + e.what(), 0, 0, where);
  }
}

}  // namespace

std::string AssetSpec::display_name() const {
  std::string out = name;
  for (char& c : out)
    if (c == '_') c = ' ';
  return out;
}

AssetCatalog::AssetCatalog(std::vector<AssetSpec> assets) : assets_(std::move(assets)) {
  for (std::size_t i = 0; i < assets_.size(); ++i) {
    const auto& a = assets_[i];
    if (a.name.empty()) throw Error("asset with empty name");
    if (!(a.half_extents.x > 0 && a.half_extents.y > 0 && a.half_extents.z > 0) || !a.half_extents.finite())
      throw Error("asset '" + a.name + "': half extents must be positive");
    if (a.is_grabbable && a.volume() > 0.125 + 1e-12)
      throw Error("asset '" + a.name + "': grabbable assets must not exceed 0.125 m^3");
    if (!index_.emplace(a.name, i).second) throw Error("duplicate asset name '" + a.name + "'");
  }
}

const AssetSpec* AssetCatalog::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &assets_[it->second];
}

const AssetSpec& AssetCatalog::at(std::string_view name) const {
  if (const auto* a = find(name)) return *a;
  throw Error("unknown asset '" + std::string(name) + "'");
}

AssetCatalog AssetCatalog::parse(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("asset catalog is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("asset catalog must be a JSON list");
  std::vector<AssetSpec> assets;
  for (std::size_t i = 0; i < j.size(); ++i) assets.push_back(asset_from_json(j[i], i));
  return AssetCatalog(std::move(assets));
}

AssetCatalog AssetCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open asset catalog " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string AssetCatalog::to_json() const {
  std::string out = "[\n";
  for (std::size_t i = 0; i < assets_.size(); ++i) {
    out += "  " + asset_to_json(assets_[i]).dump();
    out += i + 1 < assets_.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::shared_ptr<const AssetCatalog> AssetCatalog::builtin() {
  static const auto catalog = std::make_shared<const AssetCatalog>(builtin_assets());
  return catalog;
}

}  // namespace hearth
