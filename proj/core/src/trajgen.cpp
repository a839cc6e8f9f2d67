#include "hearth/trajgen.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hearth/actions.hpp"
#include "hearth/planner.hpp"

namespace hearth {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ojson vec_json(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }

ojson opt_json(const std::optional<ObjectId>& id) { return id ? ojson(*id) : ojson(nullptr); }

Vec3 vec_from(const ojson& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

std::optional<ObjectId> opt_from(const ojson& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<ObjectId>();
}

ojson final_state_json(const FinalState& f) {
  ojson j;
  j["agent"] = {{"position", vec_json(f.agent.position)},
                {"yaw", f.agent.yaw},
                {"pitch", f.agent.pitch},
                {"held", opt_json(f.agent.held)},
                {"pending_target", opt_json(f.agent.pending_target)}};
  j["user"] = {{"position", vec_json(f.user.position)}, {"yaw", f.user.yaw}};
  j["objects"] = ojson::array();
  for (const auto& o : f.objects) {
    j["objects"].push_back({{"id", o.id},
                            {"asset", o.asset},
                            {"position", vec_json(o.position)},
                            {"yaw", o.yaw},
                            {"parent_receptacle", opt_json(o.parent_receptacle)},
                            {"open_state", o.open_state ? ojson(*o.open_state) : ojson(nullptr)}});
  }
  j["step_count"] = f.step_count;
  return j;
}

FinalState final_state_from(const ojson& j) {
  FinalState f;
  const auto& a = j.at("agent");
  f.agent.position = vec_from(a.at("position"));
  f.agent.yaw = a.at("yaw").get<double>();
  f.agent.pitch = a.at("pitch").get<double>();
  f.agent.held = opt_from(a.at("held"));
  f.agent.pending_target = opt_from(a.at("pending_target"));
  f.user.position = vec_from(j.at("user").at("position"));
  f.user.yaw = j.at("user").at("yaw").get<double>();
  for (const auto& o : j.at("objects")) {
    ObjectInstance inst;
    inst.id = o.at("id").get<ObjectId>();
    inst.asset = o.at("asset").get<std::string>();
    inst.position = vec_from(o.at("position"));
    inst.yaw = o.at("yaw").get<double>();
    inst.parent_receptacle = opt_from(o.at("parent_receptacle"));
    if (!o.at("open_state").is_null()) inst.open_state = o.at("open_state").get<bool>();
    f.objects.push_back(std::move(inst));
  }
  f.step_count = j.at("step_count").get<int>();
  return f;
}

ojson camera_json(const CameraConfig& c) {
  return {{"width", c.width}, {"height", c.height}, {"horizontal_fov", c.horizontal_fov},
          {"eye_height", c.eye_height}, {"near", c.near}, {"far", c.far}};
}

CameraConfig camera_from(const ojson& j) {
  CameraConfig c;
  c.width = j.at("width").get<int>();
  c.height = j.at("height").get<int>();
  c.horizontal_fov = j.at("horizontal_fov").get<double>();
  c.eye_height = j.at("eye_height").get<double>();
  c.near = j.at("near").get<double>();
  c.far = j.at("far").get<double>();
  c.validate();
  return c;
}

ojson task_json(const TaskInstance& t) {
  return {{"template", std::string(to_string(t.tmpl))},
          {"instruction", t.instruction},
          {"object_a", opt_json(t.object_a)},
          {"object_b", opt_json(t.object_b)},
          {"answer", t.answer ? ojson(*t.answer) : ojson(nullptr)}};
}

void write_file(const fs::path& p, std::string_view bytes) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + p.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed for " + p.string());
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ojson parse_json_file(const fs::path& p) {
  try {
    return ojson::parse(read_file(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0, 0, p.filename().string());
  }
}

std::string frame_name(std::size_t n) { return fmt::format("frames/{:04d}.png", n); }

/// Writes the scene once per hash; concurrent writers of the same hash produce the same bytes.
void store_scene(const fs::path& scenes, const SceneSpec& scene, const std::string& hash, std::uint64_t seed) {
  const fs::path target = scenes / (hash + ".scene.json");
  if (fs::exists(target)) return;
  const fs::path tmp = scenes / fmt::format(".{}.{}.tmp", hash, seed);
  write_file(tmp, save_scene(scene));
  fs::rename(tmp, target);
}

}  // namespace

FinalState snapshot(const EnvState& state) {
  return {state.agent, state.user, state.scene.objects, state.step_count};
}

double max_position_error(const FinalState& a, const FinalState& b) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.agent.held != b.agent.held || a.agent.pending_target != b.agent.pending_target ||
      a.objects.size() != b.objects.size() || a.step_count != b.step_count)
    return kInf;
  auto d = [](const Vec3& p, const Vec3& q) { return (p - q).norm(); };
  double e = std::max({d(a.agent.position, b.agent.position), d(a.user.position, b.user.position),
                       std::fabs(a.agent.yaw - b.agent.yaw), std::fabs(a.agent.pitch - b.agent.pitch),
                       std::fabs(a.user.yaw - b.user.yaw)});
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    const auto& p = a.objects[i];
    const auto& q = b.objects[i];
    if (p.id != q.id || p.asset != q.asset || p.parent_receptacle != q.parent_receptacle || p.open_state != q.open_state)
      return kInf;
    e = std::max({e, d(p.position, q.position), std::fabs(p.yaw - q.yaw)});
  }
  return e;
}

std::string episode_dir_name(std::uint64_t seed, TaskTemplate tmpl) { return fmt::format("{}_{}", seed, to_string(tmpl)); }

Trajectory generate_episode(std::uint64_t seed, TaskTemplate tmpl, const EpisodeConfig& config) {
  config.camera.validate();
  auto [scene, task] = generate_scene_for_task(seed, tmpl, config.procgen, *config.catalog);
  Trajectory traj;
  traj.seed = seed;
  traj.scene_hash = scene_hash(scene);
  traj.scene = scene;
  traj.task = task;
  traj.camera = config.camera;

  EnvState env = reset(scene, config.catalog, config.sim);
  const auto a = task.object_a;
  traj.initially_visible = a && visible(env, *a, config.camera);
  std::string observation = encode_png(render_egocentric(env, config.camera));

  ExecuteOptions opt;
  opt.camera = config.camera;
  opt.on_keyframe = [&](const Keyframe& kf) {
    TrajectoryStep s;
    s.action = to_code(kf.actions);
    s.frame_png = std::move(observation);
    s.target = kf.target;
    s.target_visible = a && visible(env, *a, config.camera);
    traj.keyframes.push_back(std::move(s));
    observation = encode_png(kf.frame);
  };
  try {
    execute_program(env, compile_task(task), opt);
  } catch (const Error& e) {
    traj.failure_reason = std::string("planner: ") + e.what();
  }
  if (!traj.failure_reason && traj.keyframes.empty()) traj.failure_reason = "empty trajectory";
  if (!traj.failure_reason) {
    const EvalOutcome out = evaluate(env, traj, task, {}, config.camera);
    traj.success = out.success;
    if (!out.success) traj.failure_reason = "evaluation: " + out.reason;
  }
  traj.final_state = snapshot(env);
  return traj;
}

void export_interleaved(const Trajectory& traj, const fs::path& dir) {
  if (fs::exists(dir)) throw Error("refusing to overwrite existing directory " + dir.string());
  fs::create_directories(dir / "frames");
  std::string jsonl;
  for (std::size_t n = 0; n < traj.keyframes.size(); ++n) {
    const auto& k = traj.keyframes[n];
    write_file(dir / frame_name(n), k.frame_png);
    ojson line{{"step", n}, {"frame", frame_name(n)}, {"action", k.action}};
    if (k.target) line["target"] = *k.target;
    jsonl += line.dump() + "\n";
  }
  write_file(dir / "trajectory.jsonl", jsonl);
  ojson meta;
  meta["task"] = traj.task.instruction;
  meta["template"] = std::string(to_string(traj.task.tmpl));
  meta["scene_hash"] = traj.scene_hash;
  meta["success"] = traj.success;
  meta["seed"] = traj.seed;
  if (traj.task.answer) meta["answer"] = *traj.task.answer;
  if (traj.failure_reason) meta["failure_reason"] = *traj.failure_reason;
  meta["task_spec"] = task_json(traj.task);
  meta["keyframes"] = traj.keyframes.size();
  meta["camera"] = camera_json(traj.camera);
  meta["final_state"] = final_state_json(traj.final_state);
  write_file(dir / "meta.json", meta.dump(2) + "\n");
}

std::string DatasetManifest::to_json() const {
  ojson j;
  j["config"] = config_json.empty() ? ojson::object() : ojson::parse(config_json);
  j["totals"] = {{"episodes", total}, {"succeeded", succeeded}, {"rejected", rejected}};
  j["episodes"] = ojson::array();
  for (const auto& e : episodes) {
    ojson r{{"seed", e.seed},
            {"template", std::string(to_string(e.tmpl))},
            {"path", e.path},
            {"success", e.success},
            {"keyframe_count", e.keyframe_count}};
    if (!e.reason.empty()) r["reason"] = e.reason;
    j["episodes"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

DatasetManifest generate_dataset(const DatasetRequest& req) {
  if (req.templates.empty()) throw Error("no templates requested");
  req.episode.procgen.validate();
  req.episode.camera.validate();
  const fs::path root = req.out_dir;
  fs::create_directories(root / "scenes");
  fs::create_directories(root / "episodes");
  fs::create_directories(root / "rejected");

  std::vector<ManifestEntry> entries(req.count);
  std::vector<std::string> errors(req.count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < req.count; i = next++) {
      const std::uint64_t seed = req.seed_start + i;
      const TaskTemplate tmpl = req.templates[i % req.templates.size()];
      ManifestEntry& m = entries[i];
      m.seed = seed;
      m.tmpl = tmpl;
      const std::string name = episode_dir_name(seed, tmpl);
      try {
        try {
          Trajectory t = generate_episode(seed, tmpl, req.episode);
          store_scene(root / "scenes", t.scene, t.scene_hash, seed);
          m.success = t.success;
          m.keyframe_count = t.keyframes.size();
          m.reason = t.failure_reason.value_or("");
          m.path = (t.success ? "episodes/" : "rejected/") + name;
          export_interleaved(t, root / m.path);
        } catch (const GenerationFailed& e) {
          m.success = false;
          m.reason = std::string("generation: ") + e.what();
          m.path = "rejected/" + name;
          fs::create_directories(root / m.path);
          ojson meta{{"seed", seed}, {"template", std::string(to_string(tmpl))}, {"success", false}, {"failure_reason", m.reason}};
          write_file(root / m.path / "meta.json", meta.dump(2) + "\n");
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::clamp<std::size_t>(req.parallelism, 1, std::max<std::size_t>(req.count, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < req.count; ++i)
    if (!errors[i].empty()) throw Error(fmt::format("episode seed {} failed: {}", req.seed_start + i, errors[i]));

  DatasetManifest man;
  man.episodes = std::move(entries);
  ojson cfg;
  cfg["seed_start"] = req.seed_start;
  cfg["count"] = req.count;
  cfg["templates"] = ojson::array();
  for (auto t : req.templates) cfg["templates"].push_back(std::string(to_string(t)));
  const auto& pg = req.episode.procgen;
  cfg["procgen"] = {{"room_count", pg.room_count},
                    {"house_extent", pg.extent()},
                    {"furniture_per_room", {pg.furniture_per_room.lo, pg.furniture_per_room.hi}},
                    {"small_objects_per_room", {pg.small_objects_per_room.lo, pg.small_objects_per_room.hi}},
                    {"max_placement_attempts", pg.max_placement_attempts},
                    {"spawn_separation", pg.spawn_separation}};
  cfg["camera"] = camera_json(req.episode.camera);
  const auto& sc = req.episode.sim;
  cfg["sim"] = {{"agent_radius", sc.agent_radius}, {"reach", sc.reach},           {"cone_degrees", sc.cone_degrees},
                {"eye_height", sc.eye_height},     {"pitch_limit", sc.pitch_limit}};
  man.config_json = cfg.dump();
  man.total = man.episodes.size();
  for (const auto& e : man.episodes) (e.success ? man.succeeded : man.rejected)++;
  write_file(root / "manifest.json", man.to_json());
  return man;
}

EnvState replay_episode(const fs::path& dir, const ReplayOptions& options) {
  const ojson meta = parse_json_file(dir / "meta.json");
  const fs::path scenes = options.scenes_dir.empty() ? dir.parent_path().parent_path() / "scenes" : options.scenes_dir;
  std::string hash;
  CameraConfig cam = options.camera;
  FinalState recorded;
  try {
    hash = meta.at("scene_hash").get<std::string>();
    if (meta.contains("camera")) cam = camera_from(meta.at("camera"));
    if (options.verify_final_state) recorded = final_state_from(meta.at("final_state"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad meta.json: ") + e.what(), 0, 0, "meta.json");
  }
  const SceneSpec scene = load_scene(read_file(scenes / (hash + ".scene.json")));
  if (scene_hash(scene) != hash) throw ReplayDivergence("scene hash mismatch for " + hash);

  EnvState env = reset(scene, options.catalog, options.sim);
  std::istringstream lines(read_file(dir / "trajectory.jsonl"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ojson rec;
    std::string action;
    std::optional<ObjectId> target;
    try {
      rec = ojson::parse(line);
      if (rec.at("step").get<std::size_t>() != n) throw ParseError(fmt::format("expected step {}", n), static_cast<int>(n + 1));
      action = rec.at("action").get<std::string>();
      if (rec.contains("target")) target = rec.at("target").get<ObjectId>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad trajectory line: ") + e.what(), static_cast<int>(n + 1), 0, "trajectory.jsonl");
    }
    const ActionGroup group = parse_action_group(action);
    if (group.actions.empty()) throw ParseError("empty action group", static_cast<int>(n + 1), 0, "trajectory.jsonl");
    if (options.verify_frames) {
      const std::string expected = read_file(dir / rec.value("frame", frame_name(n)));
      if (encode_png(render_egocentric(env, cam)) != expected)
        throw ReplayDivergence(fmt::format("frame {} differs on replay", n));
    }
    env.agent.pending_target = target;
    step(env, group.actions);
    ++n;
  }
  if (options.verify_final_state) {
    const double err = max_position_error(snapshot(env), recorded);
    if (!(err <= 1e-6)) throw ReplayDivergence(fmt::format("final state differs from record (error {})", err));
  }
  return env;
}

}  // namespace hearth
