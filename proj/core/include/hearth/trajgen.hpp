#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hearth/eval.hpp"
#include "hearth/procgen.hpp"
#include "hearth/render.hpp"
#include "hearth/sim.hpp"
#include "hearth/trajectory.hpp"

namespace hearth {

struct EpisodeConfig {
  ProcGenConfig procgen;
  CameraConfig camera;
  SimConfig sim;
  std::shared_ptr<const AssetCatalog> catalog = AssetCatalog::builtin();
};

/// Scene, task, program, execution and evaluation for one seed. GenerationFailed
/// propagates; planner failures come back as success == false.
Trajectory generate_episode(std::uint64_t seed, TaskTemplate tmpl, const EpisodeConfig& config = {});

struct ManifestEntry {
  std::uint64_t seed = 0;
  TaskTemplate tmpl = TaskTemplate::come_here;
  std::string path;  ///< relative to the dataset root
  bool success = false;
  std::size_t keyframe_count = 0;
  std::string reason;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> episodes;  ///< sorted by seed
  std::string config_json;              ///< generation settings snapshot
  std::size_t total = 0;
  std::size_t succeeded = 0;
  std::size_t rejected = 0;

  std::string to_json() const;
};

struct DatasetRequest {
  std::uint64_t seed_start = 0;
  std::size_t count = 0;
  std::vector<TaskTemplate> templates{kAllTemplates.begin(), kAllTemplates.end()};
  unsigned parallelism = 1;
  std::filesystem::path out_dir;
  EpisodeConfig episode;
};

/// Seeds [seed_start, seed_start + count) round-robin over templates. Output bytes do
/// not depend on parallelism. Failed episodes go under rejected/.
DatasetManifest generate_dataset(const DatasetRequest& request);

/// Writes frames/NNNN.png, trajectory.jsonl and meta.json into a new directory.
/// Throws hearth::Error when `dir` already exists.
void export_interleaved(const Trajectory& traj, const std::filesystem::path& dir);

class ReplayDivergence : public Error {
 public:
  using Error::Error;
};

struct ReplayOptions {
  /// Scene store; defaults to <dir>/../../scenes.
  std::filesystem::path scenes_dir;
  /// Re-render every observation and compare PNG bytes.
  bool verify_frames = true;
  /// Compare the replayed final state against meta.json.
  bool verify_final_state = true;
  CameraConfig camera;
  SimConfig sim;
  std::shared_ptr<const AssetCatalog> catalog = AssetCatalog::builtin();
};

/// Re-steps an exported episode from reset. Throws ParseError for malformed files and
/// ReplayDivergence on hash, frame or final-state mismatch.
EnvState replay_episode(const std::filesystem::path& dir, const ReplayOptions& options = {});

/// Name of an episode directory: <seed>_<template>.
std::string episode_dir_name(std::uint64_t seed, TaskTemplate tmpl);

}  // namespace hearth
