#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hearth/actions.hpp"
#include "hearth/assets.hpp"
#include "hearth/nav.hpp"
#include "hearth/scene.hpp"

namespace hearth {

struct SimConfig {
  double agent_radius = kDefaultAgentRadius;
  double reach = kDefaultReach;
  double cone_degrees = 20.0;
  double eye_height = 1.5;
  double pitch_limit = 60.0;
  /// Gap left before the first contact when a move is clamped.
  double stop_margin = 0.001;
  /// Hand position relative to the feet: forward, right, height.
  double hand_forward = 0.35;
  double hand_right = 0.2;
  double hand_height = 1.0;
  /// Resolution of the put spiral search.
  double put_step = 0.05;
};

struct AgentState {
  Vec3 position;
  double yaw = 0.0;
  double pitch = 0.0;
  std::optional<ObjectId> held;
  std::optional<ObjectId> pending_target;
  bool operator==(const AgentState&) const = default;
};

struct Event {
  enum class Kind { moved, blocked, spoke, grabbed, placed, opened, closed, interact_failed };
  Kind kind = Kind::moved;
  double distance = 0.0;  ///< moved
  ObjectId id = -1;       ///< grabbed, placed, opened, closed
  ObjectId receptacle = -1;  ///< placed
  std::string text;       ///< spoke text or failure reason
  bool operator==(const Event&) const = default;
};

std::string to_string(const Event& e);

struct StepResult {
  std::vector<Event> events;
  bool failed() const;
};

class InvalidScene : public Error {
 public:
  using Error::Error;
};

/// Live simulation state. Single owner; copy to fork.
struct EnvState {
  SceneSpec scene;
  std::shared_ptr<const AssetCatalog> catalog;
  SimConfig config;
  AgentState agent;
  Pose user;
  /// Walkability at the body radius; held objects are ignored.
  NavGrid grid;
  std::vector<Event> event_log;
  int step_count = 0;

  const AssetSpec& asset_of(ObjectId id) const;
};

EnvState reset(const SceneSpec& scene, std::shared_ptr<const AssetCatalog> catalog, const SimConfig& config = {});

StepResult step(EnvState& state, const Action& action);
StepResult step(EnvState& state, std::span<const Action> group);

std::optional<ObjectId> resolve_target(const EnvState& state);

/// Moves the user avatar: yaw first, then (dx right, dz forward) in the user's own frame,
/// clamped exactly like the agent.
void move_user(EnvState& state, double dx, double dz, double dyaw);

// Geometry helpers shared with the planner and renderer.
Vec3 eye_position(const EnvState& state);
Vec3 gaze_direction(double yaw, double pitch);
/// Horizontal distance from the agent's feet to the object's footprint.
double reach_distance(const EnvState& state, ObjectId id);
bool in_reach(const EnvState& state, ObjectId id);
bool in_gaze_cone(const EnvState& state, ObjectId id);
/// Obstacles for a body of the configured radius, excluding the held object.
std::vector<Rect> body_obstacles(const EnvState& state);
void rebuild_grid(EnvState& state);

}  // namespace hearth
