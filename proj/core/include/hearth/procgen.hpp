#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hearth/assets.hpp"
#include "hearth/llm.hpp"
#include "hearth/scene.hpp"
#include "hearth/task.hpp"

namespace hearth {

struct IntRange {
  int lo = 0;
  int hi = 0;
  bool operator==(const IntRange&) const = default;
};

struct ProcGenConfig {
  int room_count = 1;
  /// Side of the square house in meters; 0 picks a size from room_count.
  double house_extent = 0.0;
  IntRange furniture_per_room{3, 5};
  IntRange small_objects_per_room{2, 4};
  int max_placement_attempts = 100;
  /// Minimum agent-user spawn distance.
  double spawn_separation = 1.0;

  /// Throws hearth::Error for inconsistent settings.
  void validate() const;
  double extent() const;
};

struct PlacementConstraint {
  std::string required_asset;
  std::optional<std::string> required_receptacle;
  std::optional<std::string> room_kind;
};

class GenerationFailed : public Error {
 public:
  GenerationFailed(std::string stage, const std::string& detail)
      : Error("scene generation failed at stage '" + stage + "': " + detail), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class UnsatisfiableConstraint : public Error {
 public:
  using Error::Error;
};

class StillInvalidAfterRepairs : public Error {
 public:
  StillInvalidAfterRepairs(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

inline constexpr double kDoorWidth = 1.2;
inline constexpr double kDoorCornerMargin = 0.6;
inline constexpr int kSceneAttempts = 8;

std::span<const std::string_view> room_kinds();
std::span<const std::string_view> furniture_for(std::string_view room_kind);
std::span<const std::string_view> small_objects_for(std::string_view room_kind);

SceneSpec generate_house(std::uint64_t seed, const ProcGenConfig& config,
                         std::span<const PlacementConstraint> constraints = {},
                         const AssetCatalog& catalog = *AssetCatalog::builtin());

/// Optional steering for generate_scene_for_task (e.g. force an orange on a sofa).
struct TaskHints {
  std::optional<std::string> object;
  std::optional<std::string> receptacle;
  std::optional<std::string> room_kind;
};

std::pair<SceneSpec, TaskInstance> generate_scene_for_task(std::uint64_t seed, TaskTemplate tmpl,
                                                           const ProcGenConfig& config,
                                                           const AssetCatalog& catalog = *AssetCatalog::builtin(),
                                                           const TaskHints& hints = {});

/// Asks a scene-proposal model for a scene, feeding violations back for up to 3 repairs.
SceneSpec propose_scene_external(const std::string& prompt, ModelClient& client,
                                 const AssetCatalog& catalog = *AssetCatalog::builtin());

}  // namespace hearth
