#include "hearth/task.hpp"

#include "hearth/error.hpp"

namespace hearth {

std::string_view to_string(TaskTemplate t) {
  switch (t) {
    case TaskTemplate::come_here: return "come_here";
    case TaskTemplate::go_to: return "go_to";
    case TaskTemplate::pick_up: return "pick_up";
    case TaskTemplate::bring_me: return "bring_me";
    case TaskTemplate::where_is: return "where_is";
    case TaskTemplate::put_on: return "put_on";
  }
  return "come_here";
}

TaskTemplate template_from_string(std::string_view name) {
  for (auto t : kAllTemplates)
    if (to_string(t) == name) return t;
  throw Error("unknown task template '" + std::string(name) + "'");
}

bool needs_object_a(TaskTemplate t) { return t != TaskTemplate::come_here; }
bool needs_object_b(TaskTemplate t) { return t == TaskTemplate::put_on; }

}  // namespace hearth
