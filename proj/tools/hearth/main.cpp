#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/pattern_formatter.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "config.hpp"
#include "hearth/eval.hpp"
#include "hearth/llm.hpp"
#include "hearth/nav.hpp"
#include "hearth/procgen.hpp"
#include "hearth/render.hpp"
#include "hearth/scene.hpp"
#include "hearth/server.hpp"
#include "hearth/sim.hpp"
#include "hearth/trajgen.hpp"

namespace {

using namespace hearth;

/// Operational failure: message already meaningful to the operator.
struct Failure {
  std::string message;
};

/// %* : the log payload as a JSON string literal.
class JsonPayload : public spdlog::custom_flag_formatter {
 public:
  void format(const spdlog::details::log_msg& msg, const std::tm&, spdlog::memory_buf_t& dest) override {
    const std::string s = nlohmann::json(std::string(msg.payload.data(), msg.payload.size())).dump();
    dest.append(s.data(), s.data() + s.size());
  }
  std::unique_ptr<custom_flag_formatter> clone() const override { return std::make_unique<JsonPayload>(); }
};

void setup_logging(bool json) {
  auto logger = std::make_shared<spdlog::logger>("hearth", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  if (json) {
    auto f = std::make_unique<spdlog::pattern_formatter>();
    f->add_flag<JsonPayload>('*').set_pattern(R"({"time":"%Y-%m-%dT%H:%M:%S.%e","level":"%l","msg":%*})");
    logger->set_formatter(std::move(f));
  } else {
    logger->set_pattern("[%l] %v");
  }
  spdlog::set_default_logger(logger);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Failure{"cannot read " + path};
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Failure{"cannot write " + path};
  f << bytes;
  if (!f) throw Failure{"write failed for " + path};
}

std::shared_ptr<const AssetCatalog> load_catalog(const std::string& path) {
  if (path.empty()) return AssetCatalog::builtin();
  return std::make_shared<const AssetCatalog>(AssetCatalog::load(path));
}

std::vector<TaskTemplate> parse_templates(const std::vector<std::string>& names) {
  std::vector<TaskTemplate> out;
  for (const auto& n : names) out.push_back(template_from_string(n));
  if (out.empty()) out.assign(kAllTemplates.begin(), kAllTemplates.end());
  return out;
}

struct Options {
  bool json_logs = false;
  std::string assets;
  std::uint64_t seed = 0;
  int rooms = 1;
  std::string out;
  // gen-scene
  std::string dump_navgrid, dump_frame, dump_instance, prompt;
  // validate / replay
  std::string input;
  std::string scenes;
  bool skip_frames = false;
  // gen-dataset / eval
  std::size_t count = 10;
  std::vector<std::string> templates;
  unsigned parallelism = 1;
  std::vector<int> room_list;
  std::string policy = "oracle";
  int step_cap = kDefaultStepCap;
  // serve
  std::string bind = "127.0.0.1:8800";
};

int gen_scene(const Options& o) {
  auto catalog = load_catalog(o.assets);
  SceneSpec scene;
  if (!o.prompt.empty()) {
    auto client = client_from_env("SCENE_LLM_ENDPOINT");
    if (!client) throw Failure{"--prompt needs SCENE_LLM_ENDPOINT to be set"};
    scene = propose_scene_external(o.prompt, *client, *catalog);
    scene.seed = o.seed;
  } else {
    ProcGenConfig pg;
    pg.room_count = o.rooms;
    scene = generate_house(o.seed, pg, {}, *catalog);
  }
  const std::string bytes = save_scene(scene);
  if (o.out.empty() || o.out == "-") {
    std::fwrite(bytes.data(), 1, bytes.size(), stdout);
  } else {
    write_file(o.out, bytes);
    spdlog::info("wrote {} (hash {}, {} objects)", o.out, scene_hash(scene), scene.objects.size());
  }
  if (!o.dump_navgrid.empty()) write_file(o.dump_navgrid, to_pgm(build_nav_grid(scene, *catalog)));
  if (!o.dump_frame.empty() || !o.dump_instance.empty()) {
    const EnvState env = reset(scene, catalog);
    const Frame frame = render_egocentric(env);
    if (!o.dump_frame.empty()) write_file(o.dump_frame, encode_png(frame));
    if (!o.dump_instance.empty()) write_file(o.dump_instance, encode_instance_png(frame));
  }
  return 0;
}

int validate(const Options& o) {
  auto catalog = load_catalog(o.assets);
  const SceneSpec scene = load_scene(read_file(o.input));
  const auto violations = validate_scene(scene, *catalog);
  for (const auto& v : violations) std::printf("%s: %s\n", std::string(to_string(v.kind)).c_str(), v.message.c_str());
  std::printf("%zu violations\n", violations.size());
  return violations.empty() ? 0 : 1;
}

int gen_dataset(const Options& o) {
  DatasetRequest req;
  req.seed_start = o.seed;
  req.count = o.count;
  req.templates = parse_templates(o.templates);
  req.parallelism = o.parallelism;
  req.out_dir = o.out;
  req.episode.procgen.room_count = o.rooms;
  req.episode.catalog = load_catalog(o.assets);
  const DatasetManifest m = generate_dataset(req);
  spdlog::info("{} episodes: {} succeeded, {} rejected -> {}", m.total, m.succeeded, m.rejected, o.out);
  return 0;
}

int replay(const Options& o) {
  ReplayOptions opt;
  opt.scenes_dir = o.scenes;
  opt.verify_frames = !o.skip_frames;
  opt.catalog = load_catalog(o.assets);
  const EnvState env = replay_episode(o.input, opt);
  std::printf("replay ok: %d steps, agent at (%.3f, %.3f) yaw %.1f, held %s\n", env.step_count, env.agent.position.x,
              env.agent.position.z, env.agent.yaw, env.agent.held ? std::to_string(*env.agent.held).c_str() : "none");
  return 0;
}

int eval(const Options& o) {
  std::unique_ptr<Policy> policy;
  if (o.policy == "oracle") {
    policy = make_oracle_policy();
  } else if (o.policy == "random") {
    policy = make_random_policy(o.seed);
  } else {
    throw Failure{"unknown policy '" + o.policy + "'"};
  }
  std::vector<EpisodeSpec> episodes;
  const std::vector<int> rooms = o.room_list.empty() ? std::vector<int>{o.rooms} : o.room_list;
  for (auto t : parse_templates(o.templates))
    for (int r : rooms)
      for (std::size_t i = 0; i < o.count; ++i) episodes.push_back({o.seed + i, t, r});
  PolicyEvalConfig cfg;
  cfg.step_cap = o.step_cap;
  const EvalReport report = run_policy_eval(*policy, episodes, cfg);
  std::fputs(report.format_table().c_str(), stdout);
  const std::string out = o.out.empty() ? "eval_report.json" : o.out;
  write_file(out, report.to_json());
  spdlog::info("wrote {}", out);
  return 0;
}

int serve(const Options& o) {
  const auto [host, port] = parse_bind_address(o.bind);
  ServerConfig cfg;
  cfg.catalog = load_catalog(o.assets);
  cfg.code_client = client_from_env("CODE_LLM_ENDPOINT");
  SessionServer server(cfg, host, port);
  server.start();
  spdlog::info("listening on ws://{}:{}/session", host, server.port());
  server.run_until_signal();
  spdlog::info("shut down");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural household scenes, oracle trajectories and a session server."};
  app.require_subcommand(1);
  auto cfg_reader = std::make_shared<hearth::cli::JsonOrTomlConfig>();
  app.config_formatter(cfg_reader);
  app.set_config("--config", "", "TOML or JSON file with option values");
  Options o;
  app.add_flag("--json-logs", o.json_logs, "Structured JSON log lines");

  auto rooms_check = CLI::Range(1, 4);

  auto* gs = app.add_subcommand("gen-scene", "Generate one scene");
  gs->add_option("--seed", o.seed, "Generation seed")->required();
  gs->add_option("--rooms", o.rooms, "Room count")->check(rooms_check);
  gs->add_option("--out", o.out, "Output scene file (stdout when omitted)");
  gs->add_option("--assets", o.assets, "Asset catalog JSON");
  gs->add_option("--dump-navgrid", o.dump_navgrid, "Write the navigation grid as PGM");
  gs->add_option("--dump-frame", o.dump_frame, "Write the spawn view as PNG");
  gs->add_option("--dump-instance", o.dump_instance, "Write the spawn instance buffer as 16-bit PNG");
  gs->add_option("--prompt", o.prompt, "Ask the scene model (SCENE_LLM_ENDPOINT) instead of the generator");

  auto* va = app.add_subcommand("validate", "Check a scene file");
  va->add_option("scene", o.input, "Scene file")->required()->check(CLI::ExistingFile);
  va->add_option("--assets", o.assets, "Asset catalog JSON");

  auto* gd = app.add_subcommand("gen-dataset", "Generate oracle episodes");
  gd->add_option("--seed", o.seed, "First seed")->required();
  gd->add_option("--count", o.count, "Number of episodes");
  gd->add_option("--templates", o.templates, "Task templates")->delimiter(',');
  gd->add_option("--rooms", o.rooms, "Room count")->check(rooms_check);
  gd->add_option("--parallelism", o.parallelism, "Worker threads")->check(CLI::Range(1u, 256u));
  gd->add_option("--out", o.out, "Dataset directory")->required();
  gd->add_option("--assets", o.assets, "Asset catalog JSON");

  auto* rp = app.add_subcommand("replay", "Re-step an exported episode");
  rp->add_option("episode", o.input, "Episode directory")->required()->check(CLI::ExistingDirectory);
  rp->add_option("--scenes", o.scenes, "Scene store (default <episode>/../../scenes)");
  rp->add_flag("--skip-frames", o.skip_frames, "Do not re-render frames");
  rp->add_option("--assets", o.assets, "Asset catalog JSON");

  auto* ev = app.add_subcommand("eval", "Run a policy over generated episodes");
  ev->add_option("--seed", o.seed, "First seed")->required();
  ev->add_option("--count", o.count, "Episodes per template and room setting");
  ev->add_option("--templates", o.templates, "Task templates")->delimiter(',');
  ev->add_option("--rooms", o.room_list, "Room settings")->delimiter(',')->check(rooms_check);
  ev->add_option("--policy", o.policy, "oracle or random")->check(CLI::IsMember({"oracle", "random"}));
  ev->add_option("--step-cap", o.step_cap, "Keyframe cap per episode")->check(CLI::NonNegativeNumber);
  ev->add_option("--out", o.out, "Report path (default eval_report.json)");

  auto* sv = app.add_subcommand("serve", "Run the WebSocket session server");
  sv->add_option("--bind", o.bind, "host:port");
  sv->add_option("--assets", o.assets, "Asset catalog JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  setup_logging(o.json_logs);

  try {
    if (*gs) return gen_scene(o);
    if (*va) return validate(o);
    if (*gd) return gen_dataset(o);
    if (*rp) return replay(o);
    if (*ev) return eval(o);
    if (*sv) return serve(o);
  } catch (const Failure& f) {
    spdlog::error("{}", f.message);
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 2;
}
