#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hearth/procgen.hpp"
#include "hearth/render.hpp"
#include "hearth/sim.hpp"
#include "hearth/task.hpp"
#include "hearth/trajectory.hpp"

namespace hearth {

inline constexpr double kProximity = 1.5;
inline constexpr int kDefaultStepCap = 50;

struct EvalThresholds {
  /// Agent-user distance for come_here / bring_me.
  double proximity = kProximity;
};

struct EvalOutcome {
  bool success = false;
  std::size_t steps = 0;
  double path_meters = 0.0;
  std::string reason;
  /// where_is: an answer was spoken before the target was ever visible.
  bool spoke_without_sight = false;
};

/// Success rules per template, applied to the final state of an episode.
EvalOutcome evaluate(const EnvState& final, const Trajectory& traj, const TaskInstance& task,
                     const EvalThresholds& thresholds = {}, const CameraConfig& cam = {});

struct HistoryEntry {
  std::string frame_png;  ///< observation shown to the policy
  std::string action;     ///< action code the policy returned for it (empty for the latest)
};

/// Policy boundary: task text plus interleaved history in, one action-code group out.
/// Replies may end with done(); text that fails to parse counts as a protocol violation.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  /// Privileged hook for in-process policies that read internal state.
  virtual void begin_episode(const EnvState& env, const TaskInstance& task) {
    (void)env;
    (void)task;
  }
  virtual std::string next(const std::string& task_text, std::span<const HistoryEntry> history) = 0;
  /// Whether the policy needs rendered frames in the history.
  virtual bool wants_frames() const { return true; }
};

/// Replays the planner's keyframes for the episode, then done().
std::unique_ptr<Policy> make_oracle_policy(const CameraConfig& cam = {});
/// Uniform choice over a fixed action menu (done() included), seeded per episode.
std::unique_ptr<Policy> make_random_policy(std::uint64_t seed);

struct EpisodeSpec {
  std::uint64_t seed = 0;
  TaskTemplate tmpl = TaskTemplate::come_here;
  int rooms = 1;
};

struct PolicyEpisodeResult {
  EpisodeSpec spec;
  std::string instruction;
  EvalOutcome outcome;
};

struct EvalCell {
  int episodes = 0;
  int successes = 0;
  double rate() const { return episodes ? static_cast<double>(successes) / episodes : 0.0; }
};

struct EvalReport {
  std::string policy;
  int step_cap = kDefaultStepCap;
  /// template -> rooms -> cell
  std::map<TaskTemplate, std::map<int, EvalCell>> table;
  std::vector<PolicyEpisodeResult> episodes;

  /// Success-rate grid with one row per template and one column per room setting.
  std::string format_table() const;
  std::string to_json() const;
};

struct PolicyEvalConfig {
  ProcGenConfig procgen;
  CameraConfig camera;
  SimConfig sim;
  int step_cap = kDefaultStepCap;
};

EvalReport run_policy_eval(Policy& policy, std::span<const EpisodeSpec> episodes, const PolicyEvalConfig& config = {});

}  // namespace hearth
