#include <gtest/gtest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include <hearth/eval.hpp>
#include <hearth/server.hpp>

#include "fuzz.hpp"
#include "support.hpp"

using namespace hearth;
using namespace hearth::test;
using nlohmann::json;

namespace {

struct Replies {
  std::vector<json> all;
  Session::Send sink() {
    return [this](const std::string& s) { all.push_back(json::parse(s)); };
  }
  std::vector<std::string> types() const {
    std::vector<std::string> t;
    for (const auto& j : all) t.push_back(j.at("type"));
    return t;
  }
};

std::vector<json> send(Session& s, const json& msg) {
  Replies r;
  s.handle(msg.dump(), r.sink());
  return r.all;
}

json orange_scene_json() { return json::parse(save_scene(orange_fixture().scene)); }

json msg(const std::string& type, json fields = json::object()) {
  fields["v"] = 1;
  fields["type"] = type;
  return fields;
}

}  // namespace

TEST(Server, Base64RoundTrip) {
  for (std::string s : {"", "a", "ab", "abc", "\x00\xff\x10 binary"}) EXPECT_EQ(base64_decode(base64_encode(s)), s);
  EXPECT_EQ(base64_encode("hello"), "aGVsbG8=");
  EXPECT_THROW(base64_decode("@@@@"), ParseError);
}

TEST(Server, BindAddress) {
  EXPECT_EQ(parse_bind_address("127.0.0.1:8800"), (std::pair<std::string, std::uint16_t>{"127.0.0.1", 8800}));
  EXPECT_THROW(parse_bind_address("localhost"), Error);
  EXPECT_THROW(parse_bind_address("h:99999"), Error);
  EXPECT_THROW(parse_bind_address("h:12a"), Error);
}

TEST(Server, ResetObserveStep) {
  Session s{ServerConfig{}};
  auto r = send(s, msg("observe"));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "no_scene");

  r = send(s, msg("reset", {{"seed", 42}}));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["type"], "reset_ok");
  EXPECT_EQ(r[0]["v"], 1);
  EXPECT_EQ(r[0]["scene_hash"], scene_hash(generate_house(42, ProcGenConfig{})));

  r = send(s, msg("observe"));
  ASSERT_EQ(r.size(), 1u);
  ASSERT_EQ(r[0]["type"], "frame");
  const DecodedImage img = decode_png(base64_decode(r[0]["png_base64"].get<std::string>()));
  EXPECT_EQ(img.width, 256);

  r = send(s, msg("step", {{"action", "rotate_right(30), speak(\"hi\")"}}));
  Replies rr{r};
  EXPECT_EQ(rr.types(), (std::vector<std::string>{"frame", "spoke", "state"}));
  EXPECT_EQ(r[0]["actions"], "rotate_right(30), speak(\"hi\")");
  EXPECT_EQ(r[1]["text"], "hi");
  EXPECT_EQ(r[2]["step_count"], 2);

  r = send(s, msg("step", {{"action", "done()"}}));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["type"], "state");
}

TEST(Server, UserMoveUpdatesState) {
  Session s{ServerConfig{}};
  send(s, msg("reset", {{"scene", orange_scene_json()}}));
  const Vec3 before = s.env()->user.position;
  const auto r = send(s, msg("user_move", {{"dx", 0.0}, {"dz", 0.5}, {"dyaw", 0.0}}));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["type"], "state");
  EXPECT_GT(planar_distance(before, s.env()->user.position), 0.4);
  EXPECT_DOUBLE_EQ(r[0]["user"]["position"][2].get<double>(), s.env()->user.position.z);
}

TEST(Server, ChatWhereIsTheOrange) {
  Session s{ServerConfig{}};
  send(s, msg("reset", {{"scene", orange_scene_json()}}));
  Replies r;
  s.handle(msg("chat", {{"text", "where is the orange"}}).dump(), r.sink());
  const auto types = r.types();
  ASSERT_GE(types.size(), 3u);
  EXPECT_EQ(types.back(), "state");
  EXPECT_EQ(types.front(), "frame");
  bool answered = false;
  for (const auto& j : r.all)
    if (j["type"] == "spoke") answered = answered || j["text"] == "It's on the sofa.";
  EXPECT_TRUE(answered);
}

TEST(Server, ChatComeHereAfterUserMoved) {
  Session s{ServerConfig{}};
  send(s, msg("reset", {{"scene", orange_scene_json()}}));
  send(s, msg("user_move", {{"dx", 0.0}, {"dz", 1.5}, {"dyaw", 0.0}}));
  const auto r = send(s, msg("chat", {{"text", "come here"}}));
  EXPECT_EQ(r.back()["type"], "state");
  EXPECT_LE(planar_distance(s.env()->agent.position, s.env()->user.position), kProximity);
}

TEST(Server, ChatRefusalAndScriptedCodeModel) {
  Session s{ServerConfig{}};
  send(s, msg("reset", {{"scene", orange_scene_json()}}));
  auto r = send(s, msg("chat", {{"text", "juggle three oranges"}}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0]["text"], std::string(kRefusal));
  EXPECT_EQ(r[1]["type"], "state");

  ServerConfig cfg;
  cfg.code_client = std::make_shared<ScriptedModelClient>(
      std::vector<std::string>{json{{"code", "find(36)\nspeak(\"It's on the sofa.\")"}}.dump()});
  Session m{cfg};
  send(m, msg("reset", {{"scene", orange_scene_json()}}));
  r = send(m, msg("chat", {{"text", "anything at all"}}));
  EXPECT_EQ(r.back()["type"], "state");
  EXPECT_EQ(r[r.size() - 2]["text"], "It's on the sofa.");
}

TEST(Server, ChatPlanFailureIsReported) {
  SceneSpec sealed = two_rooms();
  sealed.doors.clear();
  sealed.agent_spawn = {{1.0, 0.0, 1.0}, 0.0};
  Session s{ServerConfig{}};
  ASSERT_EQ(send(s, msg("reset", {{"scene", json::parse(save_scene(sealed))}}))[0]["type"], "reset_ok");
  const auto r = send(s, msg("chat", {{"text", "come here"}}));
  ASSERT_GE(r.size(), 2u);
  EXPECT_EQ(r[r.size() - 2]["code"], "plan_failed");
  EXPECT_EQ(r.back()["type"], "state");
}

TEST(Server, ErrorCodes) {
  Session s{ServerConfig{}};
  auto code = [&](const std::string& text) {
    Replies r;
    s.handle(text, r.sink());
    EXPECT_EQ(r.all.size(), 1u) << text;
    return r.all.empty() ? std::string() : r.all[0].value("code", std::string());
  };
  EXPECT_EQ(code("{"), "bad_json");
  EXPECT_EQ(code("[1]"), "bad_json");
  EXPECT_EQ(code(R"({"type":"state"})"), "bad_version");
  EXPECT_EQ(code(R"({"v":2,"type":"state"})"), "bad_version");
  EXPECT_EQ(code(R"({"v":1,"type":"dance"})"), "unknown_type");
  EXPECT_EQ(code(R"({"v":1})"), "bad_field");
  EXPECT_EQ(code(R"({"v":1,"type":"state"})"), "no_scene");
  EXPECT_EQ(code(R"({"v":1,"type":"reset","seed":1,"colour":2})"), "bad_field");
  EXPECT_EQ(code(R"({"v":1,"type":"reset","seed":1,"rooms":9})"), "bad_field");
  EXPECT_EQ(code(R"({"v":1,"type":"reset","scene":{"rooms":[]}})"), "invalid_scene");
  SceneSpec broken = open_room();
  broken.objects.push_back(floor_object(1, "plant", 9.0, 9.0));
  EXPECT_EQ(code(json{{"v", 1}, {"type", "reset"}, {"scene", json::parse(save_scene(broken))}}.dump()), "invalid_scene");
  EXPECT_EQ(code(R"({"v":1,"type":"reset","seed":1})"), "");
  EXPECT_EQ(code(R"j({"v":1,"type":"step","action":"fly(1)"})j"), "bad_action");
  EXPECT_EQ(code(R"({"v":1,"type":"step"})"), "bad_field");
  EXPECT_EQ(code(R"({"v":1,"type":"user_move","dx":1,"dz":0})"), "bad_field");
  EXPECT_EQ(code(R"({"v":1,"type":"user_move","dx":10,"dz":0,"dyaw":0})"), "bad_field");
  EXPECT_EQ(code(R"({"v":1,"type":"chat","text":""})"), "bad_field");
}

TEST(Server, FuzzedMessagesAllGetErrors) {
  Rng rng(77);
  Session s{ServerConfig{}};
  for (int i = 0; i < 1500; ++i) {
    if (i == 500) send(s, msg("reset", {{"seed", 2}}));
    const std::string m = malformed_message(rng);
    Replies r;
    ASSERT_NO_THROW(s.handle(m, r.sink()));
    ASSERT_FALSE(r.all.empty()) << m;
    for (const auto& j : r.all) ASSERT_EQ(j["type"], "error") << m << " -> " << j.dump();
  }
}

// ------------------------------------------------------------ live transport

namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

struct Client {
  asio::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};

  explicit Client(std::uint16_t port) {
    tcp::resolver resolver(ioc);
    asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws.handshake("127.0.0.1", "/session");
  }
  void write(const json& j) { ws.write(asio::buffer(j.dump())); }
  json read() {
    beast::flat_buffer b;
    ws.read(b);
    return json::parse(beast::buffers_to_string(b.data()));
  }
  /// Reads until a message of `type` arrives; returns everything read.
  std::vector<json> read_until(const std::string& type) {
    std::vector<json> out;
    do out.push_back(read());
    while (out.back()["type"] != type);
    return out;
  }
};

}  // namespace

TEST(ServerLive, WebSocketSession) {
  SessionServer server(ServerConfig{}, "127.0.0.1", 0);
  server.start();
  ASSERT_NE(server.port(), 0);
  {
    Client c(server.port());
    c.write(msg("reset", {{"scene", orange_scene_json()}}));
    EXPECT_EQ(c.read()["type"], "reset_ok");
    c.write(msg("observe"));
    const json f = c.read();
    ASSERT_EQ(f["type"], "frame");
    EXPECT_EQ(decode_png(base64_decode(f["png_base64"].get<std::string>())).height, 256);

    // Two chats back to back are answered in order.
    c.write(msg("chat", {{"text", "where is the orange"}}));
    c.write(msg("state"));
    const auto stream = c.read_until("state");
    bool answered = false;
    for (const auto& j : stream) answered = answered || (j["type"] == "spoke" && j["text"] == "It's on the sofa.");
    EXPECT_TRUE(answered);
    EXPECT_EQ(c.read()["type"], "state");

    c.write(msg("teleport"));
    EXPECT_EQ(c.read()["code"], "unknown_type");

    // A second client gets its own world.
    Client d(server.port());
    d.write(msg("state"));
    EXPECT_EQ(d.read()["code"], "no_scene");
  }
  server.stop();
}

TEST(ServerLive, WrongPathIsRefused) {
  SessionServer server(ServerConfig{}, "127.0.0.1", 0);
  server.start();
  asio::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};
  tcp::resolver resolver(ioc);
  asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
  beast::error_code ec;
  ws.handshake("127.0.0.1", "/elsewhere", ec);
  EXPECT_TRUE(ec);
  server.stop();
}

TEST(ServerLive, StopWithOpenConnection) {
  SessionServer server(ServerConfig{}, "127.0.0.1", 0);
  server.start();
  Client c(server.port());
  c.write(msg("reset", {{"seed", 1}}));
  EXPECT_EQ(c.read()["type"], "reset_ok");
  server.stop();
  beast::flat_buffer b;
  beast::error_code ec;
  c.ws.read(b, ec);
  EXPECT_TRUE(ec);
}

TEST(ServerLive, BindFailureThrows) {
  SessionServer a(ServerConfig{}, "127.0.0.1", 0);
  a.start();
  SessionServer b(ServerConfig{}, "127.0.0.1", a.port());
  EXPECT_THROW(b.start(), Error);
  a.stop();
}
