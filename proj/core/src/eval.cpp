#include "hearth/eval.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hearth/actions.hpp"
#include "hearth/planner.hpp"
#include "hearth/rng.hpp"

namespace hearth {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double user_distance(const EnvState& env) { return planar_distance(env.agent.position, env.user.position); }

EvalOutcome fail(EvalOutcome o, std::string reason) {
  o.success = false;
  o.reason = std::move(reason);
  return o;
}

class OraclePolicy : public Policy {
 public:
  explicit OraclePolicy(const CameraConfig& cam) : cam_(cam) {}
  std::string name() const override { return "oracle"; }
  bool wants_frames() const override { return false; }

  void begin_episode(const EnvState& env, const TaskInstance& task) override {
    queue_.clear();
    EnvState copy = env;
    ExecuteOptions opt;
    opt.camera = cam_;
    opt.render_frames = false;
    try {
      for (const auto& kf : execute_program(copy, compile_task(task), opt)) queue_.push_back(to_code(kf.actions));
    } catch (const Error&) {
      // Whatever was planned before the failure is still played back.
    }
  }

  std::string next(const std::string&, std::span<const HistoryEntry>) override {
    if (queue_.empty()) return "done()";
    std::string s = std::move(queue_.front());
    queue_.pop_front();
    if (queue_.empty()) s += ", done()";
    return s;
  }

 private:
  CameraConfig cam_;
  std::deque<std::string> queue_;
};

class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : seed_(seed), rng_(seed) {}
  std::string name() const override { return "random"; }
  bool wants_frames() const override { return false; }

  void begin_episode(const EnvState& env, const TaskInstance&) override { rng_ = Rng(seed_).split(env.scene.seed); }

  std::string next(const std::string&, std::span<const HistoryEntry>) override {
    static constexpr std::string_view kMenu[] = {
        "move_forward(0.5)", "move_forward(1)",  "rotate_right(30)",  "rotate_right(-30)", "rotate_right(90)",
        "rotate_right(-90)", "interact(grab)",   "speak(\"hello\")", "done()"};
    return std::string(kMenu[rng_.index(std::size(kMenu))]);
  }

 private:
  std::uint64_t seed_;
  Rng rng_;
};

}  // namespace

EvalOutcome evaluate(const EnvState& final, const Trajectory& traj, const TaskInstance& task,
                     const EvalThresholds& thresholds, const CameraConfig& cam) {
  EvalOutcome o;
  o.steps = traj.keyframes.size();
  std::optional<std::string> last_spoken;
  for (const auto& e : final.event_log) {
    if (e.kind == Event::Kind::moved) o.path_meters += e.distance;
    if (e.kind == Event::Kind::spoke) last_spoken = e.text;
  }
  auto need = [&](const std::optional<ObjectId>& id, const char* which) {
    if (!id || !final.scene.find_object(*id)) throw Error(fmt::format("task has no valid object {}", which));
    return *id;
  };
  o.success = true;
  switch (task.tmpl) {
    case TaskTemplate::come_here: {
      const double d = user_distance(final);
      if (d > thresholds.proximity) return fail(o, fmt::format("too far from user ({:.2f} m)", d));
      break;
    }
    case TaskTemplate::go_to: {
      const ObjectId a = need(task.object_a, "A");
      if (!in_reach(final, a)) return fail(o, "target not in reach");
      if (!visible(final, a, cam)) return fail(o, "target not visible");
      break;
    }
    case TaskTemplate::pick_up: {
      const ObjectId a = need(task.object_a, "A");
      if (final.agent.held != a) return fail(o, "not holding target");
      break;
    }
    case TaskTemplate::bring_me: {
      const ObjectId a = need(task.object_a, "A");
      if (final.agent.held != a) return fail(o, "not holding target");
      const double d = user_distance(final);
      if (d > thresholds.proximity) return fail(o, fmt::format("too far from user ({:.2f} m)", d));
      break;
    }
    case TaskTemplate::where_is: {
      need(task.object_a, "A");
      if (!task.answer) throw Error("where_is task without an answer");
      // An answer given before the object was ever seen is flagged, not failed.
      bool seen = traj.initially_visible;
      bool spoke = false;
      for (std::size_t i = 0; i < traj.keyframes.size() && !spoke; ++i) {
        seen = seen || traj.keyframes[i].target_visible;
        spoke = traj.keyframes[i].action.find("speak(") != std::string::npos;
      }
      o.spoke_without_sight = spoke && !seen;
      if (!last_spoken) return fail(o, "no answer spoken");
      if (lowercase(*last_spoken).find(lowercase(*task.answer)) == std::string::npos)
        return fail(o, fmt::format("wrong answer '{}'", *last_spoken));
      break;
    }
    case TaskTemplate::put_on: {
      const ObjectId a = need(task.object_a, "A");
      const ObjectId b = need(task.object_b, "B");
      if (final.agent.held) return fail(o, "hand not empty");
      if (receptacle_of(final.scene, a) != b) return fail(o, "object not on receptacle");
      break;
    }
  }
  return o;
}

std::unique_ptr<Policy> make_oracle_policy(const CameraConfig& cam) { return std::make_unique<OraclePolicy>(cam); }

std::unique_ptr<Policy> make_random_policy(std::uint64_t seed) { return std::make_unique<RandomPolicy>(seed); }

EvalReport run_policy_eval(Policy& policy, std::span<const EpisodeSpec> episodes, const PolicyEvalConfig& config) {
  EvalReport report;
  report.policy = policy.name();
  report.step_cap = config.step_cap;
  auto catalog = AssetCatalog::builtin();
  for (const auto& spec : episodes) {
    PolicyEpisodeResult res;
    res.spec = spec;
    EvalCell& cell = report.table[spec.tmpl][spec.rooms];
    ++cell.episodes;

    ProcGenConfig pg = config.procgen;
    pg.room_count = spec.rooms;
    std::optional<std::pair<SceneSpec, TaskInstance>> made;
    try {
      made = generate_scene_for_task(spec.seed, spec.tmpl, pg, *catalog);
    } catch (const Error& e) {
      res.outcome.reason = std::string("generation failed: ") + e.what();
      report.episodes.push_back(std::move(res));
      continue;
    }
    const TaskInstance& task = made->second;
    res.instruction = task.instruction;
    EnvState env = reset(made->first, catalog, config.sim);
    Trajectory traj;
    traj.task = task;
    traj.initially_visible = task.object_a && visible(env, *task.object_a, config.camera);

    std::vector<HistoryEntry> history;
    std::optional<std::string> violation;
    bool done = false;
    try {
      policy.begin_episode(env, task);
      while (static_cast<int>(traj.keyframes.size()) < config.step_cap) {
        HistoryEntry h;
        if (policy.wants_frames()) h.frame_png = encode_png(render_egocentric(env, config.camera));
        history.push_back(std::move(h));
        std::string reply = policy.next(task.instruction, history);
        ActionGroup group;
        try {
          group = parse_action_group(reply);
        } catch (const ParseError& e) {
          violation = std::string("protocol violation: ") + e.what();
          break;
        }
        history.back().action = reply;
        if (!group.actions.empty()) {
          TrajectoryStep ts;
          ts.action = to_code(group.actions);
          step(env, group.actions);
          ts.target_visible = task.object_a && visible(env, *task.object_a, config.camera);
          traj.keyframes.push_back(std::move(ts));
        }
        if (group.done) {
          done = true;
          break;
        }
      }
    } catch (const std::exception& e) {
      violation = std::string("policy error: ") + e.what();
    }

    if (violation) {
      res.outcome.steps = traj.keyframes.size();
      res.outcome.reason = *violation;
    } else if (!done) {
      res.outcome.steps = traj.keyframes.size();
      res.outcome.reason = "step cap";
    } else {
      res.outcome = evaluate(env, traj, task, {}, config.camera);
    }
    if (res.outcome.success) ++cell.successes;
    report.episodes.push_back(std::move(res));
  }
  return report;
}

std::string EvalReport::format_table() const {
  std::set<int> columns;
  for (const auto& [t, row] : table)
    for (const auto& [rooms, c] : row) columns.insert(rooms);
  auto column_name = [](int rooms) {
    static constexpr const char* kNames[] = {"", "One-room", "Two-room", "Three-room", "Four-room"};
    return rooms >= 1 && rooms <= 4 ? std::string(kNames[rooms]) : fmt::format("{}-room", rooms);
  };
  std::string out = fmt::format("Policy: {} (step cap {})\n| Task |", policy, step_cap);
  for (int c : columns) out += " " + column_name(c) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& [t, row] : table) {
    out += fmt::format("| {} |", to_string(t));
    for (int c : columns) {
      auto it = row.find(c);
      out += it == row.end() ? " - |" : fmt::format(" {:.2f} ({}/{}) |", it->second.rate(), it->second.successes, it->second.episodes);
    }
    out += "\n";
  }
  return out;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["policy"] = policy;
  j["step_cap"] = step_cap;
  std::set<int> columns;
  for (const auto& [t, row] : table)
    for (const auto& [rooms, c] : row) columns.insert(rooms);
  j["columns"] = nlohmann::ordered_json::array();
  for (int c : columns) j["columns"].push_back(c);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& [t, row] : table) {
    nlohmann::ordered_json r;
    r["template"] = std::string(to_string(t));
    r["cells"] = nlohmann::ordered_json::object();
    for (const auto& [rooms, c] : row)
      r["cells"][std::to_string(rooms)] = {{"episodes", c.episodes}, {"successes", c.successes}, {"rate", c.rate()}};
    j["rows"].push_back(std::move(r));
  }
  j["episodes"] = nlohmann::ordered_json::array();
  for (const auto& e : episodes) {
    j["episodes"].push_back({{"seed", e.spec.seed},
                             {"template", std::string(to_string(e.spec.tmpl))},
                             {"rooms", e.spec.rooms},
                             {"instruction", e.instruction},
                             {"success", e.outcome.success},
                             {"steps", e.outcome.steps},
                             {"path_meters", e.outcome.path_meters},
                             {"reason", e.outcome.reason},
                             {"spoke_without_sight", e.outcome.spoke_without_sight}});
  }
  return j.dump(2) + "\n";
}

}  // namespace hearth
