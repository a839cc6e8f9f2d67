#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hearth/assets.hpp"
#include "hearth/llm.hpp"
#include "hearth/scene.hpp"
#include "hearth/task.hpp"

namespace hearth {

class NoEligibleObjects : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kPhraseVariants = 3;

/// Phrase templates with {A} and {B} placeholders.
const std::array<std::string_view, kPhraseVariants>& phrase_variants(TaskTemplate t);

std::string render_instruction(TaskTemplate t, std::size_t variant, std::string_view a_name = {},
                               std::string_view b_name = {});

/// Objects whose asset occurs exactly once in the scene, so a display name identifies them.
std::vector<ObjectId> uniquely_named_objects(const SceneSpec& scene);

/// Eligible (A, B) bindings for a template; B is -1 when unused. come_here yields one
/// empty binding.
std::vector<std::pair<ObjectId, ObjectId>> eligible_bindings(TaskTemplate t, const SceneSpec& scene,
                                                              const AssetCatalog& catalog);

/// Builds a task for fixed bindings; the phrase variant is chosen by `variant`.
TaskInstance make_task(TaskTemplate t, const SceneSpec& scene, const AssetCatalog& catalog, std::optional<ObjectId> a,
                       std::optional<ObjectId> b, std::size_t variant);

TaskInstance instantiate_template(TaskTemplate t, const SceneSpec& scene, const AssetCatalog& catalog,
                                  std::uint64_t rng_seed);

/// Rule-based mapping of a free-form command onto a template and scene objects.
std::optional<TaskInstance> map_instruction(std::string_view text, const SceneSpec& scene,
                                            const AssetCatalog& catalog);

struct ExternalTasks {
  std::vector<TaskInstance> tasks;
  int dropped = 0;
};

ExternalTasks tasks_for_scene_external(const SceneSpec& scene, const AssetCatalog& catalog, ModelClient& client);

}  // namespace hearth
