#include "hearth/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hearth/render.hpp"

namespace hearth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Event failed(std::string reason) {
  Event e;
  e.kind = Event::Kind::interact_failed;
  e.text = std::move(reason);
  return e;
}

/// Entry parameter of the ray p + t*u into the open interior of r; kInf when the ray
/// never enters or starts inside.
double enter_time(const Vec3& p, const Vec3& u, const Rect& r) {
  double t0 = -kInf, t1 = kInf;
  const double ps[2] = {p.x, p.z}, us[2] = {u.x, u.z};
  const double lo[2] = {r.min_x, r.min_z}, hi[2] = {r.max_x, r.max_z};
  for (int a = 0; a < 2; ++a) {
    if (std::fabs(us[a]) < 1e-12) {
      if (!(ps[a] > lo[a] && ps[a] < hi[a])) return kInf;
      continue;
    }
    double ta = (lo[a] - ps[a]) / us[a], tb = (hi[a] - ps[a]) / us[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 >= t1 || t1 <= 0) return kInf;
  if (t0 < -1e-9) return kInf;
  return std::max(t0, 0.0);
}

double circle_time(const Vec3& p, const Vec3& u, const Vec3& c, double radius) {
  const double wx = p.x - c.x, wz = p.z - c.z;
  const double ww = wx * wx + wz * wz, wu = wx * u.x + wz * u.z;
  const double rr = radius * radius;
  if (ww < rr - 1e-9 || wu >= 0) return kInf;
  const double disc = wu * wu - (ww - rr);
  if (disc < 0) return kInf;
  const double t = -wu - std::sqrt(disc);
  return t >= 0 ? t : 0.0;
}

struct Sweep {
  double travelled = 0.0;
  bool blocked = false;
};

Sweep sweep(Vec3& pos, double yaw, double distance, const std::vector<Rect>& obstacles, const Vec3& other,
            double other_radius, double margin) {
  const Vec3 u = planar_forward(yaw);
  double hit = circle_time(pos, u, other, other_radius);
  for (const auto& r : obstacles) hit = std::min(hit, enter_time(pos, u, r));
  Sweep s;
  if (hit <= distance) {
    s.travelled = std::max(0.0, hit - margin);
  } else {
    s.travelled = distance;
  }
  s.blocked = s.travelled < distance - margin;
  pos = pos + u * s.travelled;
  pos.y = 0.0;
  return s;
}

void place_in_hand(EnvState& st) {
  if (!st.agent.held) return;
  auto* obj = st.scene.find_object(*st.agent.held);
  if (!obj) return;
  const auto& c = st.config;
  const double r = deg_to_rad(st.agent.yaw);
  const Vec3 fwd{std::sin(r), 0.0, std::cos(r)};
  const Vec3 right{std::cos(r), 0.0, -std::sin(r)};
  Vec3 p = st.agent.position + fwd * c.hand_forward + right * c.hand_right;
  p.y = c.hand_height;
  obj->position = p;
}

bool supports_others(const SceneSpec& scene, ObjectId id) {
  return std::any_of(scene.objects.begin(), scene.objects.end(),
                     [&](const ObjectInstance& o) { return o.parent_receptacle == id; });
}

std::optional<Vec3> free_spot(const EnvState& st, ObjectId held, ObjectId receptacle) {
  const AABB top = world_aabb(st.scene, *st.catalog, receptacle);
  const ObjectInstance& h = *st.scene.find_object(held);
  const AABB hb = world_aabb(h, st.asset_of(held));
  const double hx = (hb.max.x - hb.min.x) / 2, hy = (hb.max.y - hb.min.y) / 2, hz = (hb.max.z - hb.min.z) / 2;
  const Rect surface = top.footprint();
  std::vector<Rect> siblings;
  for (const auto& o : st.scene.objects)
    if (o.parent_receptacle == receptacle && o.id != held)
      siblings.push_back(world_aabb(o, st.asset_of(o.id)).footprint());

  const double step = st.config.put_step;
  const int rings = static_cast<int>(std::ceil(std::max(surface.width(), surface.depth()) / 2 / step));
  std::vector<std::pair<int, int>> offsets;
  for (int j = -rings; j <= rings; ++j)
    for (int i = -rings; i <= rings; ++i) offsets.emplace_back(i, j);
  std::stable_sort(offsets.begin(), offsets.end(), [](const auto& a, const auto& b) {
    const int ra = std::max(std::abs(a.first), std::abs(a.second)), rb = std::max(std::abs(b.first), std::abs(b.second));
    if (ra != rb) return ra < rb;
    return a.first * a.first + a.second * a.second < b.first * b.first + b.second * b.second;
  });
  const Vec3 c = surface.center();
  for (const auto& [i, j] : offsets) {
    const double x = quantize_mm(c.x + i * step), z = quantize_mm(c.z + j * step);
    const Rect fp{x - hx, z - hz, x + hx, z + hz};
    if (!surface.contains(fp)) continue;
    if (std::any_of(siblings.begin(), siblings.end(), [&](const Rect& s) { return s.overlaps(fp); })) continue;
    return Vec3{x, quantize_mm(top.max.y + hy), z};
  }
  return std::nullopt;
}

Event do_interact(EnvState& st, InteractKind kind) {
  auto target = resolve_target(st);
  switch (kind) {
    case InteractKind::grab: {
      if (st.agent.held) return failed("hands full");
      if (!target) return failed("no target");
      const auto& a = st.asset_of(*target);
      if (!a.is_grabbable) return failed("not grabbable");
      if (supports_others(st.scene, *target)) return failed("supports other objects");
      auto* obj = st.scene.find_object(*target);
      if (obj->parent_receptacle) {
        const auto* parent = st.scene.find_object(*obj->parent_receptacle);
        if (parent && parent->open_state == false) return failed("receptacle closed");
      }
      const bool was_floor = !obj->parent_receptacle;
      obj->parent_receptacle.reset();
      st.agent.held = *target;
      st.agent.pending_target.reset();
      place_in_hand(st);
      if (was_floor) rebuild_grid(st);
      Event e;
      e.kind = Event::Kind::grabbed;
      e.id = *target;
      return e;
    }
    case InteractKind::put: {
      if (!st.agent.held) return failed("hand empty");
      if (!target) return failed("no target");
      const auto& a = st.asset_of(*target);
      if (!a.is_receptacle) return failed("not a receptacle");
      const auto* rec = st.scene.find_object(*target);
      if (a.is_openable && rec->open_state != true) return failed("receptacle closed");
      const ObjectId held = *st.agent.held;
      auto spot = free_spot(st, held, *target);
      if (!spot) return failed("no free spot");
      auto* obj = st.scene.find_object(held);
      obj->position = *spot;
      obj->parent_receptacle = *target;
      st.agent.held.reset();
      Event e;
      e.kind = Event::Kind::placed;
      e.id = held;
      e.receptacle = *target;
      return e;
    }
    case InteractKind::open:
    case InteractKind::close: {
      if (!target) return failed("no target");
      const auto& a = st.asset_of(*target);
      if (!a.is_openable) return failed("not openable");
      auto* obj = st.scene.find_object(*target);
      const bool want = kind == InteractKind::open;
      if (obj->open_state.value_or(false) == want) return failed(want ? "already open" : "already closed");
      obj->open_state = want;
      Event e;
      e.kind = want ? Event::Kind::opened : Event::Kind::closed;
      e.id = *target;
      return e;
    }
  }
  return failed("unknown interaction");
}

}  // namespace

std::string to_string(const Event& e) {
  switch (e.kind) {
    case Event::Kind::moved: return "moved(" + format_number(std::round(e.distance * 1e6) / 1e6) + ")";
    case Event::Kind::blocked: return "blocked";
    case Event::Kind::spoke: return "spoke(" + quote_string(e.text) + ")";
    case Event::Kind::grabbed: return fmt::format("grabbed({})", e.id);
    case Event::Kind::placed: return fmt::format("placed({}, {})", e.id, e.receptacle);
    case Event::Kind::opened: return fmt::format("opened({})", e.id);
    case Event::Kind::closed: return fmt::format("closed({})", e.id);
    case Event::Kind::interact_failed: return "interact_failed(" + quote_string(e.text) + ")";
  }
  return "?";
}

bool StepResult::failed() const {
  return std::any_of(events.begin(), events.end(), [](const Event& e) {
    return e.kind == Event::Kind::interact_failed || e.kind == Event::Kind::blocked;
  });
}

const AssetSpec& EnvState::asset_of(ObjectId id) const {
  const auto* o = scene.find_object(id);
  if (!o) throw Error("unknown object id " + std::to_string(id));
  return catalog->at(o->asset);
}

std::vector<Rect> body_obstacles(const EnvState& st) {
  std::vector<ObjectId> ignore;
  if (st.agent.held) ignore.push_back(*st.agent.held);
  return inflated_obstacles(st.scene, *st.catalog, st.config.agent_radius, ignore);
}

void rebuild_grid(EnvState& st) {
  std::vector<ObjectId> ignore;
  if (st.agent.held) ignore.push_back(*st.agent.held);
  st.grid = build_nav_grid(st.scene, *st.catalog, st.config.agent_radius, kDefaultCellSize, ignore);
}

EnvState reset(const SceneSpec& scene, std::shared_ptr<const AssetCatalog> catalog, const SimConfig& config) {
  if (!catalog) throw Error("reset requires an asset catalog");
  auto violations = validate_scene(scene, *catalog);
  if (!violations.empty()) {
    std::string msg = fmt::format("scene has {} violation(s)", violations.size());
    for (const auto& v : violations) msg += "; " + v.message;
    throw InvalidScene(msg);
  }
  EnvState st;
  st.scene = scene;
  st.catalog = std::move(catalog);
  st.config = config;
  st.agent.position = scene.agent_spawn.position;
  st.agent.position.y = 0.0;
  st.agent.yaw = normalize_yaw(scene.agent_spawn.yaw);
  st.user = scene.user_spawn;
  st.user.position.y = 0.0;
  st.user.yaw = normalize_yaw(st.user.yaw);
  rebuild_grid(st);
  return st;
}

StepResult step(EnvState& st, const Action& action) {
  StepResult res;
  struct V {
    EnvState& st;
    StepResult& res;
    void operator()(const Speak& s) {
      Event e;
      e.kind = Event::Kind::spoke;
      e.text = s.text;
      res.events.push_back(e);
    }
    void operator()(const MoveForward& m) {
      const auto obstacles = body_obstacles(st);
      const Sweep s = sweep(st.agent.position, st.agent.yaw, std::max(0.0, m.distance), obstacles, st.user.position,
                            2 * st.config.agent_radius, st.config.stop_margin);
      Event e;
      e.kind = Event::Kind::moved;
      e.distance = s.travelled;
      res.events.push_back(e);
      if (s.blocked) {
        Event b;
        b.kind = Event::Kind::blocked;
        res.events.push_back(b);
      }
    }
    void operator()(const RotateRight& r) { st.agent.yaw = normalize_yaw(st.agent.yaw + r.degrees); }
    void operator()(const RotateUp& r) {
      st.agent.pitch = std::clamp(st.agent.pitch + r.degrees, -st.config.pitch_limit, st.config.pitch_limit);
    }
    void operator()(const Interact& i) { res.events.push_back(do_interact(st, i.kind)); }
  };
  std::visit(V{st, res}, action);
  place_in_hand(st);
  ++st.step_count;
  st.event_log.insert(st.event_log.end(), res.events.begin(), res.events.end());
  return res;
}

StepResult step(EnvState& st, std::span<const Action> group) {
  StepResult all;
  for (const auto& a : group) {
    auto r = step(st, a);
    all.events.insert(all.events.end(), r.events.begin(), r.events.end());
  }
  return all;
}

Vec3 eye_position(const EnvState& st) { return st.agent.position + Vec3{0.0, st.config.eye_height, 0.0}; }

Vec3 gaze_direction(double yaw, double pitch) {
  const double y = deg_to_rad(yaw), p = deg_to_rad(pitch);
  return {std::sin(y) * std::cos(p), std::sin(p), std::cos(y) * std::cos(p)};
}

double reach_distance(const EnvState& st, ObjectId id) {
  const Rect fp = world_aabb(st.scene, *st.catalog, id).footprint();
  return fp.distance_to(st.agent.position.x, st.agent.position.z);
}

bool in_reach(const EnvState& st, ObjectId id) { return reach_distance(st, id) <= st.config.reach + 1e-9; }

bool in_gaze_cone(const EnvState& st, ObjectId id) {
  const Vec3 to = world_aabb(st.scene, *st.catalog, id).center() - eye_position(st);
  const double n = to.norm();
  if (n < 1e-9) return true;
  const double c = gaze_direction(st.agent.yaw, st.agent.pitch).dot(to) / n;
  return c >= std::cos(deg_to_rad(st.config.cone_degrees)) - 1e-12;
}

std::optional<ObjectId> resolve_target(const EnvState& st) {
  if (auto p = st.agent.pending_target) {
    if (p != st.agent.held && st.scene.find_object(*p) && in_reach(st, *p) && in_gaze_cone(st, *p)) return p;
  }
  const Vec3 eye = eye_position(st);
  std::optional<ObjectId> best;
  double best_d = kInf;
  for (const auto& o : st.scene.objects) {
    if (o.id == st.agent.held) continue;
    if (!in_reach(st, o.id) || !in_gaze_cone(st, o.id)) continue;
    const double d = (world_aabb(o, st.asset_of(o.id)).center() - eye).norm();
    if (d > best_d + 1e-12 || (std::fabs(d - best_d) <= 1e-12 && best && o.id > *best)) continue;
    if (!visible(st, o.id)) continue;
    best = o.id;
    best_d = d;
  }
  return best;
}

void move_user(EnvState& st, double dx, double dz, double dyaw) {
  st.user.yaw = normalize_yaw(st.user.yaw + dyaw);
  const double dist = std::hypot(dx, dz);
  if (dist < 1e-12) return;
  const double heading = normalize_yaw(st.user.yaw + heading_of(dx, dz));
  const auto obstacles = body_obstacles(st);
  sweep(st.user.position, heading, dist, obstacles, st.agent.position, 2 * st.config.agent_radius,
        st.config.stop_margin);
}

}  // namespace hearth
