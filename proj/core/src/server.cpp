#include "hearth/server.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <list>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/core/detail/base64.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hearth/actions.hpp"
#include "hearth/planner.hpp"
#include "hearth/taskgen.hpp"

namespace hearth {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

/// Protocol-level failure answered with an error message.
struct ProtocolError {
  std::string code;
  std::string message;
};

ojson envelope(std::string_view type) {
  ojson j;
  j["v"] = kProtocolVersion;
  j["type"] = std::string(type);
  return j;
}

/// Serialized message; invalid UTF-8 echoed from client input is replaced.
std::string wire(const ojson& j) { return j.dump(-1, ' ', false, ojson::error_handler_t::replace); }

std::string error_message(const std::string& code, const std::string& message) {
  ojson j = envelope("error");
  j["code"] = code;
  j["message"] = message;
  return wire(j);
}

ojson vec(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }

ojson rect(const Rect& r) { return ojson::array({r.min_x, r.min_z, r.max_x, r.max_z}); }

ojson state_message(const EnvState& env) {
  ojson j = envelope("state");
  j["agent"] = {{"position", vec(env.agent.position)}, {"yaw", env.agent.yaw}, {"pitch", env.agent.pitch}};
  j["user"] = {{"position", vec(env.user.position)}, {"yaw", env.user.yaw}};
  j["held"] = env.agent.held ? ojson(*env.agent.held) : ojson(nullptr);
  j["step_count"] = env.step_count;
  j["objects"] = ojson::array();
  for (const auto& o : env.scene.objects) j["objects"].push_back({{"id", o.id}, {"position", vec(o.position)}});
  return j;
}

ojson reset_message(const EnvState& env) {
  ojson j = envelope("reset_ok");
  j["scene_hash"] = scene_hash(env.scene);
  ojson scene;
  scene["rooms"] = ojson::array();
  for (const auto& r : env.scene.rooms) scene["rooms"].push_back({{"id", r.id}, {"kind", r.kind}, {"bounds", rect(r.bounds)}});
  scene["doors"] = ojson::array();
  for (const auto& d : env.scene.doors)
    scene["doors"].push_back({{"id", d.id}, {"center", ojson::array({d.center.x, d.center.z})}, {"width", d.width}});
  scene["objects"] = ojson::array();
  for (const auto& o : env.scene.objects) {
    scene["objects"].push_back({{"id", o.id},
                                {"asset", o.asset},
                                {"footprint", rect(world_aabb(o, env.asset_of(o.id)).footprint())},
                                {"parent", o.parent_receptacle ? ojson(*o.parent_receptacle) : ojson(nullptr)}});
  }
  j["scene"] = std::move(scene);
  return j;
}

ojson frame_message(const EnvState& env, const CameraConfig& cam, const std::string& actions) {
  ojson j = envelope("frame");
  j["step"] = env.step_count;
  j["png_base64"] = base64_encode(encode_png(render_egocentric(env, cam)));
  j["actions"] = actions;
  return j;
}

ojson spoke_message(std::string_view by, std::string_view text) {
  ojson j = envelope("spoke");
  j["by"] = std::string(by);
  j["text"] = std::string(text);
  return j;
}

void check_fields(const json& msg, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : msg.items()) {
    if (k == "v" || k == "type") continue;
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) throw ProtocolError{"bad_field", "unknown field '" + k + "'"};
  }
}

double number_field(const json& msg, const char* key, double limit) {
  if (!msg.contains(key)) throw ProtocolError{"bad_field", fmt::format("missing field '{}'", key)};
  const auto& v = msg.at(key);
  if (!v.is_number()) throw ProtocolError{"bad_field", fmt::format("field '{}' must be a number", key)};
  const double d = v.get<double>();
  if (!std::isfinite(d) || std::fabs(d) > limit)
    throw ProtocolError{"bad_field", fmt::format("field '{}' must be finite with magnitude <= {}", key, limit)};
  return d;
}

const std::string& string_field(const json& msg, const char* key) {
  if (!msg.contains(key)) throw ProtocolError{"bad_field", fmt::format("missing field '{}'", key)};
  const auto& v = msg.at(key);
  if (!v.is_string()) throw ProtocolError{"bad_field", fmt::format("field '{}' must be a string", key)};
  return v.get_ref<const std::string&>();
}

}  // namespace

Session::Session(ServerConfig config) : config_(std::move(config)) {
  if (!config_.catalog) config_.catalog = AssetCatalog::builtin();
}

void Session::handle(std::string_view message, const Send& send) {
  try {
    json msg;
    try {
      msg = json::parse(message);
    } catch (const json::parse_error& e) {
      throw ProtocolError{"bad_json", e.what()};
    }
    if (!msg.is_object()) throw ProtocolError{"bad_json", "message must be a JSON object"};
    if (!msg.contains("v") || !msg.at("v").is_number_integer() || msg.at("v").get<std::int64_t>() != kProtocolVersion)
      throw ProtocolError{"bad_version", fmt::format("field 'v' must be {}", kProtocolVersion)};
    if (!msg.contains("type") || !msg.at("type").is_string()) throw ProtocolError{"bad_field", "field 'type' must be a string"};
    const std::string type = msg.at("type").get<std::string>();

    auto need_env = [&]() -> EnvState& {
      if (!env_) throw ProtocolError{"no_scene", "send reset first"};
      return *env_;
    };

    if (type == "reset") {
      check_fields(msg, {"seed", "scene", "rooms"});
      if (msg.contains("seed") && msg.contains("scene")) throw ProtocolError{"bad_field", "give either 'seed' or 'scene'"};
      SceneSpec scene;
      if (msg.contains("scene")) {
        if (msg.contains("rooms")) throw ProtocolError{"bad_field", "'rooms' only applies with 'seed'"};
        if (!msg.at("scene").is_object()) throw ProtocolError{"bad_field", "field 'scene' must be an object"};
        try {
          scene = load_scene(msg.at("scene").dump());
          auto violations = validate_scene(scene, *config_.catalog);
          if (!violations.empty()) throw ProtocolError{"invalid_scene", violations.front().message};
        } catch (const ParseError& e) {
          throw ProtocolError{"invalid_scene", e.what()};
        }
      } else {
        std::uint64_t seed = 0;
        if (msg.contains("seed")) {
          if (!msg.at("seed").is_number_unsigned()) throw ProtocolError{"bad_field", "field 'seed' must be a non-negative integer"};
          seed = msg.at("seed").get<std::uint64_t>();
        }
        ProcGenConfig pg = config_.procgen;
        if (msg.contains("rooms")) {
          const auto& r = msg.at("rooms");
          if (!r.is_number_integer() || r.get<std::int64_t>() < 1 || r.get<std::int64_t>() > 4)
            throw ProtocolError{"bad_field", "field 'rooms' must be an integer in 1..4"};
          pg.room_count = r.get<int>();
        }
        try {
          scene = generate_house(seed, pg, {}, *config_.catalog);
        } catch (const Error& e) {
          throw ProtocolError{"generation_failed", e.what()};
        }
      }
      try {
        env_ = reset(scene, config_.catalog, config_.sim);
      } catch (const InvalidScene& e) {
        throw ProtocolError{"invalid_scene", e.what()};
      }
      send(wire(reset_message(*env_)));
    } else if (type == "step") {
      check_fields(msg, {"action"});
      const std::string& code = string_field(msg, "action");
      EnvState& env = need_env();
      ActionGroup group;
      try {
        group = parse_action_group(code);
      } catch (const ParseError& e) {
        throw ProtocolError{"bad_action", e.what()};
      }
      if (!group.actions.empty()) {
        step(env, group.actions);
        send(wire(frame_message(env, config_.camera, to_code(group.actions))));
        for (const auto& a : group.actions)
          if (const auto* s = std::get_if<Speak>(&a)) send(wire(spoke_message("agent", s->text)));
      }
      send(wire(state_message(env)));
    } else if (type == "observe") {
      check_fields(msg, {});
      send(wire(frame_message(need_env(), config_.camera, "")));
    } else if (type == "state") {
      check_fields(msg, {});
      send(wire(state_message(need_env())));
    } else if (type == "user_move") {
      check_fields(msg, {"dx", "dz", "dyaw"});
      const double dx = number_field(msg, "dx", 5.0);
      const double dz = number_field(msg, "dz", 5.0);
      const double dyaw = number_field(msg, "dyaw", 360.0);
      EnvState& env = need_env();
      move_user(env, dx, dz, dyaw);
      send(wire(state_message(env)));
    } else if (type == "chat") {
      check_fields(msg, {"text"});
      const std::string& text = string_field(msg, "text");
      if (text.empty()) throw ProtocolError{"bad_field", "field 'text' must not be empty"};
      EnvState& env = need_env();
      std::optional<CodeProgram> program;
      if (config_.code_client) {
        try {
          program = write_code_external(describe_scene(env.scene, *env.catalog), text, *config_.code_client);
        } catch (const Error&) {
          program.reset();
        }
      }
      if (!program) {
        if (auto task = map_instruction(text, env.scene, *env.catalog)) program = compile_task(*task);
      }
      if (!program) {
        send(wire(spoke_message("agent", kRefusal)));
        send(wire(state_message(env)));
        return;
      }
      ExecuteOptions opt;
      opt.camera = config_.camera;
      opt.on_keyframe = [&](const Keyframe& kf) {
        ojson f = envelope("frame");
        f["step"] = env.step_count;
        f["png_base64"] = base64_encode(encode_png(kf.frame));
        f["actions"] = to_code(kf.actions);
        send(wire(f));
        for (const auto& a : kf.actions)
          if (const auto* s = std::get_if<Speak>(&a)) send(wire(spoke_message("agent", s->text)));
      };
      try {
        execute_program(env, *program, opt);
      } catch (const Error& e) {
        send(error_message("plan_failed", e.what()));
      }
      send(wire(state_message(env)));
    } else {
      throw ProtocolError{"unknown_type", "unknown message type '" + type + "'"};
    }
  } catch (const ProtocolError& e) {
    send(error_message(e.code, e.message));
  } catch (const std::exception& e) {
    send(error_message("internal", e.what()));
  }
}

// ---------------------------------------------------------------- transport

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace http = beast::http;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

struct SessionServer::Impl {
  asio::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::thread accept_thread;
  std::mutex mu;
  struct Conn {
    std::shared_ptr<tcp::socket> socket;
    std::thread thread;
    std::atomic<bool> finished{false};
  };
  std::list<Conn> conns;
  std::atomic<bool> stopping{false};
  bool stopped = false;

  void serve_connection(tcp::socket& socket, const ServerConfig& config) {
    beast::error_code ec;
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    http::read(socket, buffer, req, ec);
    if (ec) return;
    if (!websocket::is_upgrade(req) || req.target() != "/session") {
      http::response<http::string_body> res{http::status::not_found, req.version()};
      res.set(http::field::content_type, "text/plain");
      res.body() = "websocket endpoint is /session\n";
      res.prepare_payload();
      http::write(socket, res, ec);
      return;
    }
    websocket::stream<tcp::socket&> ws(socket);
    ws.set_option(websocket::stream_base::decorator(
        [](websocket::response_type& r) { r.set(http::field::server, "hearth-session"); }));
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);
    Session session(config);
    while (!stopping) {
      beast::flat_buffer in;
      ws.read(in, ec);
      if (ec) break;
      const std::string text = beast::buffers_to_string(in.data());
      beast::error_code wec;
      session.handle(text, [&](const std::string& reply) {
        if (!wec) ws.write(asio::buffer(reply), wec);
      });
      if (wec) break;
    }
    if (ws.is_open()) ws.close(websocket::close_code::going_away, ec);
  }
};

SessionServer::SessionServer(ServerConfig config, std::string host, std::uint16_t port)
    : config_(std::move(config)), host_(std::move(host)), port_(port), impl_(std::make_unique<Impl>()) {}

SessionServer::~SessionServer() { stop(); }

void SessionServer::start() {
  beast::error_code ec;
  const auto address = asio::ip::make_address(host_, ec);
  if (ec) throw Error("invalid bind address '" + host_ + "'");
  const tcp::endpoint ep{address, port_};
  auto& acc = impl_->acceptor.emplace(impl_->ioc);
  acc.open(ep.protocol(), ec);
  if (!ec) acc.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(ep, ec);
  if (!ec) acc.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw Error(fmt::format("cannot bind {}:{}: {}", host_, port_, ec.message()));
  port_ = acc.local_endpoint().port();
  impl_->accept_thread = std::thread([this] {
    Impl& im = *impl_;
    while (!im.stopping) {
      auto socket = std::make_shared<tcp::socket>(im.ioc);
      beast::error_code aec;
      im.acceptor->accept(*socket, aec);
      if (aec || im.stopping) break;
      std::lock_guard lock(im.mu);
      for (auto it = im.conns.begin(); it != im.conns.end();) {
        if (it->finished) {
          it->thread.join();
          it = im.conns.erase(it);
        } else {
          ++it;
        }
      }
      auto& c = im.conns.emplace_back();
      c.socket = socket;
      c.thread = std::thread([&im, &c, cfg = config_] {
        im.serve_connection(*c.socket, cfg);
        c.finished = true;
      });
    }
  });
}

void SessionServer::stop() {
  Impl& im = *impl_;
  if (im.stopped || !im.acceptor) return;
  im.stopped = true;
  im.stopping = true;
  beast::error_code ec;
  im.acceptor->cancel(ec);
  im.acceptor->close(ec);
  // Wake a blocked accept with a throwaway connection.
  {
    tcp::socket poke(im.ioc);
    poke.connect({asio::ip::make_address(host_ == "0.0.0.0" ? "127.0.0.1" : host_, ec), port_}, ec);
  }
  if (im.accept_thread.joinable()) im.accept_thread.join();
  std::lock_guard lock(im.mu);
  for (auto& c : im.conns) c.socket->shutdown(tcp::socket::shutdown_receive, ec);
  for (auto& c : im.conns)
    if (c.thread.joinable()) c.thread.join();
  im.conns.clear();
}

void SessionServer::run_until_signal() {
  asio::io_context sig_ioc;
  asio::signal_set signals(sig_ioc, SIGINT, SIGTERM);
  signals.async_wait([](const beast::error_code&, int) {});
  sig_ioc.run();
  stop();
}

std::pair<std::string, std::uint16_t> parse_bind_address(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) throw Error("bind address must look like host:port");
  const std::string_view port_text = text.substr(colon + 1);
  unsigned port = 0;
  const auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || p != port_text.data() + port_text.size() || port > 65535)
    throw Error("invalid port in bind address '" + std::string(text) + "'");
  return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

std::string base64_encode(std::string_view bytes) {
  std::string out(beast::detail::base64::encoded_size(bytes.size()), '\0');
  out.resize(beast::detail::base64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::string base64_decode(std::string_view text) {
  std::size_t body = text.size();
  for (int pad = 0; pad < 2 && body > 0 && text[body - 1] == '='; ++pad) --body;
  if (text.size() % 4 != 0) throw ParseError("invalid base64");
  std::string out(beast::detail::base64::decoded_size(text.size()), '\0');
  const auto [written, read] = beast::detail::base64::decode(out.data(), text.data(), body);
  if (read != body) throw ParseError("invalid base64");
  out.resize(written);
  return out;
}

}  // namespace hearth
