#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hearth/geometry.hpp"

namespace hearth {

enum class Placement { floor, surface };

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Static annotation of one placeable asset. Geometry is a box given by half extents.
struct AssetSpec {
  std::string name;
  std::string category;
  Vec3 half_extents;
  bool is_receptacle = false;
  bool is_grabbable = false;
  bool is_openable = false;
  Placement placement = Placement::floor;
  Rgb color;

  /// Name used in instructions and answers ("coffee_table" -> "coffee table").
  std::string display_name() const;
  double volume() const { return 8.0 * half_extents.x * half_extents.y * half_extents.z; }

  bool operator==(const AssetSpec&) const = default;
};

/// Immutable, name-indexed set of assets. Construction checks the annotation invariants.
class AssetCatalog {
 public:
  explicit AssetCatalog(std::vector<AssetSpec> assets);

  const std::vector<AssetSpec>& assets() const { return assets_; }
  const AssetSpec* find(std::string_view name) const;
  /// Throws hearth::Error for unknown names.
  const AssetSpec& at(std::string_view name) const;

  static AssetCatalog parse(std::string_view json_text);
  static AssetCatalog load(const std::filesystem::path& path);
  std::string to_json() const;

  /// The curated catalog compiled into the library (mirrors data/assets.json).
  static std::shared_ptr<const AssetCatalog> builtin();

 private:
  std::vector<AssetSpec> assets_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace hearth
