#include "hearth/planner.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace hearth {

namespace {

double round_degrees(double d) {
  double r = std::round(d);
  return r == 0.0 ? 0.0 : r;
}
double round_meters(double d) {
  double r = std::round(d * 100.0) / 100.0;
  return r == 0.0 ? 0.0 : r;
}

/// Signed rotation (rounded) that turns `yaw` toward the planar point `to` from `from`.
double turn_toward(const Vec3& from, double yaw, const Vec3& to) {
  const double dx = to.x - from.x, dz = to.z - from.z;
  if (std::hypot(dx, dz) < 1e-9) return 0.0;
  return round_degrees(normalize_yaw(heading_of(dx, dz) - yaw));
}

/// Signed pitch change (rounded, limits respected) that centres `point` vertically.
double tilt_toward(const EnvState& env, const Vec3& feet, double pitch, const Vec3& point) {
  const Vec3 eye = feet + Vec3{0.0, env.config.eye_height, 0.0};
  const double horiz = std::hypot(point.x - eye.x, point.z - eye.z);
  double want = rad_to_deg(std::atan2(point.y - eye.y, horiz));
  want = std::clamp(want, -env.config.pitch_limit, env.config.pitch_limit);
  return round_degrees(want - pitch);
}

Vec3 object_center(const EnvState& env, ObjectId id) { return world_aabb(env.scene, *env.catalog, id).center(); }

class Executor {
 public:
  Executor(EnvState& env, const ExecuteOptions& opt) : env_(env), opt_(opt) {}

  std::vector<Keyframe> run(const CodeProgram& program) {
    for (std::size_t i = 0; i < program.primitives.size(); ++i) {
      prim_ = i;
      std::visit([&](const auto& p) { exec(p); }, program.primitives[i]);
    }
    return std::move(out_);
  }

 private:
  void require_object(ObjectId id) {
    if (!env_.scene.find_object(id)) throw PlannerError(fmt::format("object {} does not exist", id));
  }

  /// Executes one group and records it. Empty groups are dropped.
  void emit(std::vector<Action> acts) {
    if (acts.empty()) return;
    Keyframe kf;
    kf.actions = std::move(acts);
    kf.target = env_.agent.pending_target;
    kf.primitive = prim_;
    const StepResult r = step(env_, kf.actions);
    for (const auto& e : r.events) {
      if (e.kind == Event::Kind::blocked)
        throw MotionBlocked(fmt::format("motion blocked while executing '{}'", to_code(kf.actions)));
      if (e.kind == Event::Kind::interact_failed) throw InteractionFailed("interaction failed: " + e.text);
    }
    if (opt_.render_frames) kf.frame = render_egocentric(env_, opt_.camera);
    out_.push_back(std::move(kf));
    if (opt_.on_keyframe) opt_.on_keyframe(out_.back());
  }

  struct Facing {
    Vec3 point;      ///< planar heading target
    bool level = false;  ///< bring pitch back to 0 instead of centring the point
  };

  /// Follows a waypoint list. Returns early (true) once `stop` holds after a keyframe.
  bool follow(const std::vector<Vec3>& waypoints, const Facing& facing, const std::function<bool()>& stop) {
    auto stopped = [&] { return stop && stop(); };
    const auto& wps = waypoints;
    const std::size_t n = wps.size();

    auto final_turn = [&](std::vector<Action>& acts, const Vec3& pos, double yaw) {
      const double dyaw = turn_toward(pos, yaw, facing.point);
      if (dyaw != 0.0) acts.push_back(RotateRight{dyaw});
      const double dp = facing.level ? round_degrees(-env_.agent.pitch) : tilt_toward(env_, pos, env_.agent.pitch, facing.point);
      if (std::fabs(dp) >= 1.0) acts.push_back(RotateUp{dp});
    };

    if (n < 2) {
      std::vector<Action> acts;
      final_turn(acts, env_.agent.position, env_.agent.yaw);
      emit(std::move(acts));
      return stopped();
    }

    {
      const double d = turn_toward(env_.agent.position, env_.agent.yaw, wps[1]);
      std::vector<Action> acts;
      if (d != 0.0) acts.push_back(RotateRight{d});
      emit(std::move(acts));
      if (stopped()) return true;
    }
    for (std::size_t k = 1; k < n; ++k) {
      std::vector<Action> acts;
      Vec3 pos = env_.agent.position;
      const double yaw = normalize_yaw(env_.agent.yaw);
      const double dist = round_meters(planar_distance(pos, wps[k]));
      if (dist > 0.0) {
        acts.push_back(MoveForward{dist});
        pos = pos + planar_forward(yaw) * dist;
        pos.y = 0.0;
      }
      if (k + 1 < n) {
        const double d = turn_toward(pos, yaw, wps[k + 1]);
        if (d != 0.0) acts.push_back(RotateRight{d});
      } else {
        final_turn(acts, pos, yaw);
      }
      emit(std::move(acts));
      if (stopped()) return true;
    }
    return false;
  }

  /// Planning grid restricted to the agent's component so standing spots are reachable.
  NavGrid reachable_grid() {
    NavGrid grid = planning_grid(env_);
    const auto start = snap_to_walkable(grid, env_.agent.position);
    if (!start) throw UnsnappableEndpoint("agent is not near walkable floor");
    retain_component(grid, *start);
    return grid;
  }

  void go_to_object(ObjectId id, const std::function<bool()>& stop) {
    const NavGrid grid = reachable_grid();
    const Pose spot = interaction_point(env_.scene, *env_.catalog, grid, id);
    const Path path = find_path(grid, env_.agent.position, spot.position);
    follow(path.waypoints, Facing{object_center(env_, id), false}, stop);
  }

  void exec(const Goto& g) {
    require_object(g.id);
    go_to_object(g.id, {});
  }

  void exec(const Find& f) {
    require_object(f.id);
    auto seen = [&] { return visible(env_, f.id, opt_.camera); };
    if (seen()) return;
    go_to_object(f.id, seen);
    if (!seen()) throw PlannerError(fmt::format("find({}) ended without the object in view", f.id));
  }

  void exec(const GotoUser&) {
    const NavGrid grid = reachable_grid();
    const auto start = snap_to_walkable(grid, env_.agent.position);
    const Vec3 user = env_.user.position;
    const Vec3 here = grid.center(*start);
    const Rect keepout = Rect{user.x, user.z, user.x, user.z}.inflated(kUserKeepout + 1e-9);

    std::vector<std::pair<double, int>> candidates;
    for (int i = 0; i < grid.width * grid.height; ++i) {
      if (!grid.is_walkable(i)) continue;
      const Vec3 c = grid.center(i);
      if (planar_distance(c, user) > kUserApproach + 1e-9) continue;
      candidates.emplace_back(planar_distance(c, here), i);
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [d, i] : candidates) {
      const Vec3 c = grid.center(i);
      if (!line_of_sight(grid, c, user, keepout)) continue;
      const Path path = find_path(grid, env_.agent.position, c);
      follow(path.waypoints, Facing{user, true}, {});
      return;
    }
    throw Unreachable("no reachable spot next to the user");
  }

  void exec(const Target& t) {
    require_object(t.id);
    const Vec3 c = object_center(env_, t.id);
    std::vector<Action> acts;
    const double dyaw = turn_toward(env_.agent.position, env_.agent.yaw, c);
    if (dyaw != 0.0) acts.push_back(RotateRight{dyaw});
    const double dp = tilt_toward(env_, env_.agent.position, env_.agent.pitch, c);
    if (dp != 0.0) acts.push_back(RotateUp{dp});
    env_.agent.pending_target = t.id;
    emit(std::move(acts));
  }

  void exec(const InteractCall&) { emit({Interact{infer_interact_kind(env_)}}); }

  void exec(const Say& s) { emit({Speak{s.text}}); }

  EnvState& env_;
  const ExecuteOptions& opt_;
  std::vector<Keyframe> out_;
  std::size_t prim_ = 0;
};

}  // namespace

NavGrid planning_grid(const SceneSpec& scene, const AssetCatalog& catalog, const Pose& user,
                      std::optional<ObjectId> held, double body_radius) {
  std::vector<ObjectId> ignore;
  if (held) ignore.push_back(*held);
  NavGrid g = build_nav_grid(scene, catalog, body_radius + kPlanningClearance, kDefaultCellSize, ignore);
  const Vec3 u = user.position;
  block_area(g, Rect{u.x, u.z, u.x, u.z}.inflated(kUserKeepout));
  return g;
}

NavGrid planning_grid(const EnvState& env) {
  return planning_grid(env.scene, *env.catalog, env.user, env.agent.held, env.config.agent_radius);
}

InteractKind infer_interact_kind(const EnvState& env) {
  const auto t = resolve_target(env);
  if (!t) throw InteractionFailed("no target in view");
  const AssetSpec& a = env.asset_of(*t);
  const bool holding = env.agent.held.has_value();
  const bool open = env.scene.find_object(*t)->open_state.value_or(false);
  if (a.is_openable) {
    if (!holding) return open ? InteractKind::close : InteractKind::open;
    if (open && a.is_receptacle) return InteractKind::put;
    throw InteractionFailed(fmt::format("ambiguous interaction with closed {} while holding an object", a.name));
  }
  if (!holding && a.is_grabbable) return InteractKind::grab;
  if (holding && a.is_receptacle) return InteractKind::put;
  throw InteractionFailed(fmt::format("nothing to do with {} {}", a.name, *t));
}

std::vector<Keyframe> execute_program(EnvState& env, const CodeProgram& program, const ExecuteOptions& options) {
  return Executor(env, options).run(program);
}

}  // namespace hearth
