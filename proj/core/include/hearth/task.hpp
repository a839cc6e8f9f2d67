#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "hearth/scene.hpp"

namespace hearth {

enum class TaskTemplate { come_here, go_to, pick_up, bring_me, where_is, put_on };

inline constexpr std::array<TaskTemplate, 6> kAllTemplates{TaskTemplate::come_here, TaskTemplate::go_to,
                                                           TaskTemplate::pick_up,   TaskTemplate::bring_me,
                                                           TaskTemplate::where_is,  TaskTemplate::put_on};

std::string_view to_string(TaskTemplate t);
/// Throws hearth::Error for unknown names.
TaskTemplate template_from_string(std::string_view name);

struct TaskInstance {
  TaskTemplate tmpl = TaskTemplate::come_here;
  std::optional<ObjectId> object_a;
  std::optional<ObjectId> object_b;
  std::string instruction;
  /// where_is only: display name of the receptacle holding A.
  std::optional<std::string> answer;
  std::string scene_ref;
  bool operator==(const TaskInstance&) const = default;
};

/// Whether the template needs A / B bound.
bool needs_object_a(TaskTemplate t);
bool needs_object_b(TaskTemplate t);

}  // namespace hearth
