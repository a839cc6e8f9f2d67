#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hearth/actions.hpp"
#include "hearth/llm.hpp"
#include "hearth/render.hpp"
#include "hearth/sim.hpp"
#include "hearth/task.hpp"

namespace hearth {

// ---------------------------------------------------------------- programs

struct Goto {
  ObjectId id;
  bool operator==(const Goto&) const = default;
};
struct GotoUser {
  bool operator==(const GotoUser&) const = default;
};
struct Target {
  ObjectId id;
  bool operator==(const Target&) const = default;
};
struct InteractCall {
  bool operator==(const InteractCall&) const = default;
};
struct Find {
  ObjectId id;
  bool operator==(const Find&) const = default;
};
struct Say {
  std::string text;
  bool operator==(const Say&) const = default;
};

using Primitive = std::variant<Goto, GotoUser, Target, InteractCall, Find, Say>;

enum class ProgramSource { template_, llm, parsed };

struct CodeProgram {
  std::vector<Primitive> primitives;
  ProgramSource source = ProgramSource::parsed;
};

std::string to_code(const Primitive& p);
/// One call per line.
std::string to_code(const CodeProgram& program);

/// Grammar: calls separated by newlines, ';' or whitespace; integer or string arguments;
/// '#' starts a comment. Throws ParseError with line and column.
CodeProgram parse_program(std::string_view text);

/// Reference text sent to code-writing models.
std::string_view program_grammar();

/// Template expansion of a task. Throws hearth::Error when a required binding is missing.
CodeProgram compile_task(const TaskInstance& task);

/// The answer sentence spoken for where_is.
std::string answer_sentence(std::string_view receptacle_name);

class UnparseableAfterRetry : public Error {
 public:
  using Error::Error;
};

/// Asks a model for a program; one retry with the parse error appended.
CodeProgram write_code_external(const std::string& scene_description, const std::string& instruction,
                                ModelClient& client);

// ---------------------------------------------------------------- execution

/// Extra body clearance used when planning so executed motion never grazes obstacles.
inline constexpr double kPlanningClearance = 0.15;
/// Half-size of the square around the user avatar that plans avoid.
inline constexpr double kUserKeepout = 0.75;
inline constexpr double kUserApproach = 1.0;

/// Grid used by the motion planners: body radius plus kPlanningClearance, user keep-out
/// square blocked, held object ignored.
NavGrid planning_grid(const SceneSpec& scene, const AssetCatalog& catalog, const Pose& user,
                      std::optional<ObjectId> held = std::nullopt, double body_radius = kDefaultAgentRadius);
NavGrid planning_grid(const EnvState& state);

struct Keyframe {
  std::vector<Action> actions;
  /// Observation after the group executed (empty when rendering is disabled).
  Frame frame;
  /// Agent pending_target when this group started.
  std::optional<ObjectId> target;
  /// Index of the primitive that produced this keyframe.
  std::size_t primitive = 0;
};

class PlannerError : public Error {
 public:
  using Error::Error;
};
class InteractionFailed : public PlannerError {
 public:
  using PlannerError::PlannerError;
};
class MotionBlocked : public PlannerError {
 public:
  using PlannerError::PlannerError;
};

struct ExecuteOptions {
  CameraConfig camera;
  bool render_frames = true;
  /// Called after each keyframe executes.
  std::function<void(const Keyframe&)> on_keyframe;
};

/// Expands primitives into keyframes, stepping `env` as it goes.
/// Throws NoPath, UnsnappableEndpoint, Unreachable or PlannerError.
std::vector<Keyframe> execute_program(EnvState& env, const CodeProgram& program, const ExecuteOptions& options = {});

/// Interact kind the planner would choose for the current target; throws PlannerError.
InteractKind infer_interact_kind(const EnvState& env);

}  // namespace hearth
