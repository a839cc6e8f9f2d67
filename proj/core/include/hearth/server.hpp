#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "hearth/llm.hpp"
#include "hearth/procgen.hpp"
#include "hearth/render.hpp"
#include "hearth/sim.hpp"

namespace hearth {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::string_view kRefusal = "I can't do that.";

struct ServerConfig {
  CameraConfig camera;
  SimConfig sim;
  ProcGenConfig procgen;
  std::shared_ptr<const AssetCatalog> catalog = AssetCatalog::builtin();
  /// Optional code-writing model for chat; the rule-based mapper is used when null.
  std::shared_ptr<ModelClient> code_client;
};

/// One client's world. Transport independent: feed text messages in, receive replies
/// through the callback. Never throws; every message gets at least one reply.
class Session {
 public:
  using Send = std::function<void(const std::string&)>;

  explicit Session(ServerConfig config);

  void handle(std::string_view message, const Send& send);

  const EnvState* env() const { return env_ ? &*env_ : nullptr; }

 private:
  ServerConfig config_;
  std::optional<EnvState> env_;
};

/// WebSocket service on /session; one thread and one Session per connection.
class SessionServer {
 public:
  SessionServer(ServerConfig config, std::string host, std::uint16_t port);
  ~SessionServer();

  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  /// Binds and starts accepting in the background. Throws hearth::Error on bind failure.
  void start();
  /// Port actually bound (useful with port 0).
  std::uint16_t port() const { return port_; }
  /// Stops accepting, lets in-flight messages finish, closes connections and joins.
  void stop();
  /// Blocks until SIGINT or SIGTERM, then stops.
  void run_until_signal();

  struct Impl;

 private:
  ServerConfig config_;
  std::string host_;
  std::uint16_t port_;
  std::unique_ptr<Impl> impl_;
};

/// Splits "host:port".
std::pair<std::string, std::uint16_t> parse_bind_address(std::string_view text);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

}  // namespace hearth
