#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hearth/render.hpp"
#include "hearth/scene.hpp"
#include "hearth/sim.hpp"
#include "hearth/task.hpp"

namespace hearth {

/// One recorded action group and the observation it was chosen from.
struct TrajectoryStep {
  std::string action;      ///< comma-joined action codes
  std::string frame_png;   ///< observation before the group (empty when not rendered)
  std::optional<ObjectId> target;
  /// visible(object_a) after the group ran (false when the task has no object).
  bool target_visible = false;
};

/// Snapshot of everything replay must reproduce.
struct FinalState {
  AgentState agent;
  Pose user;
  std::vector<ObjectInstance> objects;
  int step_count = 0;

  bool operator==(const FinalState&) const = default;
};

FinalState snapshot(const EnvState& state);
/// Largest position error (meters) between two snapshots; infinity when they differ structurally.
double max_position_error(const FinalState& a, const FinalState& b);

struct Trajectory {
  std::uint64_t seed = 0;
  TaskInstance task;
  std::string scene_hash;
  SceneSpec scene;
  std::vector<TrajectoryStep> keyframes;
  bool initially_visible = false;
  bool success = false;
  std::optional<std::string> failure_reason;
  FinalState final_state;
  /// Camera the frames were rendered with.
  CameraConfig camera;
};

}  // namespace hearth
