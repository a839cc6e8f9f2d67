#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hearth {

enum class InteractKind { grab, put, open, close };

std::string_view to_string(InteractKind k);

struct Speak {
  std::string text;
  bool operator==(const Speak&) const = default;
};
struct MoveForward {
  double distance = 0.0;  ///< meters, >= 0
  bool operator==(const MoveForward&) const = default;
};
struct RotateRight {
  double degrees = 0.0;  ///< positive turns right (yaw increases)
  bool operator==(const RotateRight&) const = default;
};
struct RotateUp {
  double degrees = 0.0;
  bool operator==(const RotateUp&) const = default;
};
struct Interact {
  InteractKind kind = InteractKind::grab;
  bool operator==(const Interact&) const = default;
};

using Action = std::variant<Speak, MoveForward, RotateRight, RotateUp, Interact>;

bool is_motion(const Action& a);

/// Canonical code string, e.g. `move_forward(1.2)` or `speak("It's on the sofa.")`.
/// Numbers use the shortest decimal form that reads back to the same double.
std::string to_code(const Action& a);
/// Comma-joined group: `move_forward(1.2), rotate_right(-35)`.
std::string to_code(std::span<const Action> group);

struct ActionGroup {
  std::vector<Action> actions;
  /// A trailing `done()` sentinel was present.
  bool done = false;
};

/// Parses a comma-separated group of action calls. `done()` may only appear last.
/// Throws ParseError (column = 1-based offset) on malformed input.
ActionGroup parse_action_group(std::string_view text);

/// Number formatting shared by every code string.
std::string format_number(double v);
/// Double-quoted string literal with backslash escapes.
std::string quote_string(std::string_view s);

}  // namespace hearth
